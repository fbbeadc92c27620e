#include "crown/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>

#include "crown/rng.hpp"

namespace crown {

std::string to_string(SpectralMethod m) {
    return m == SpectralMethod::power_deflated ? "power-deflated" : "dense-exact";
}

double lambda_dense_exact(const Graph& g, Vertex cap) {
    Vertex n = g.num_vertices();
    if (n > cap)
        throw PreconditionError("dense-exact eigensolve capped at n <= " + std::to_string(cap));
    if (n <= 1) return 0.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.neighbors(u)) a(u, v) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();  // ascending
    // drop one copy of the top (trivial) eigenvalue
    double second_largest = ev(n - 2);
    double smallest = ev(0);
    return std::max(std::abs(second_largest), std::abs(smallest));
}

namespace {

// y = (A + shift*I) x restricted to 1^perp
void apply_deflated_shifted(const Graph& g, double shift, const std::vector<double>& x,
                            std::vector<double>& y) {
    Vertex n = g.num_vertices();
    for (Vertex u = 0; u < n; ++u) {
        double acc = shift * x[static_cast<std::size_t>(u)];
        for (Vertex v : g.neighbors(u)) acc += x[static_cast<std::size_t>(v)];
        y[static_cast<std::size_t>(u)] = acc;
    }
    double mean = 0.0;
    for (double t : y) mean += t;
    mean /= static_cast<double>(n);
    for (double& t : y) t -= mean;
}

struct PowerResult {
    double rayleigh;  // Rayleigh quotient of A itself on the converged vector
    std::int64_t iterations;
};

// Power iteration on (A + shift*I) deflated against the all-ones direction.
// Converges toward the eigenvalue of A maximizing lambda_i + shift over the
// nontrivial spectrum. Since x stays in 1^perp, the Rayleigh quotient of A
// is the shifted quotient minus the shift.
PowerResult power_extreme(const Graph& g, double shift, double tol, std::int64_t max_iter,
                          Rng& rng) {
    Vertex n = g.num_vertices();
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (double& t : x) t = rng.unit() - 0.5;
    auto deflate_normalize = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (double t : v) mean += t;
        mean /= static_cast<double>(n);
        double norm = 0.0;
        for (double& t : v) {
            t -= mean;
            norm += t * t;
        }
        norm = std::sqrt(norm);
        if (norm > 0)
            for (double& t : v) t /= norm;
        return norm;
    };
    deflate_normalize(x);

    constexpr int kWindow = 10;
    std::deque<double> recent;
    for (std::int64_t it = 1; it <= max_iter; ++it) {
        apply_deflated_shifted(g, shift, x, y);
        double r_shifted = 0.0;
        for (Vertex u = 0; u < n; ++u)
            r_shifted += x[static_cast<std::size_t>(u)] * y[static_cast<std::size_t>(u)];
        recent.push_back(r_shifted);
        if (static_cast<int>(recent.size()) > kWindow) recent.pop_front();
        if (static_cast<int>(recent.size()) == kWindow) {
            double lo = *std::min_element(recent.begin(), recent.end());
            double hi = *std::max_element(recent.begin(), recent.end());
            double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
            if ((hi - lo) / scale < tol) return {r_shifted - shift, it};
        }
        double norm = deflate_normalize(y);
        if (norm <= 1e-300) return {0.0, it};  // operator annihilates 1^perp (edgeless etc.)
        x.swap(y);
    }
    double lo = recent.empty() ? 0.0 : *std::min_element(recent.begin(), recent.end());
    double hi = recent.empty() ? 0.0 : *std::max_element(recent.begin(), recent.end());
    throw PowerIterationError("power iteration did not converge within " +
                                  std::to_string(max_iter) + " iterations",
                              lo - shift, hi - shift);
}

}  // namespace

SpectralCertificate estimate_lambda(const Graph& g, const SpectralOptions& opts) {
    if (opts.tol <= 0) throw PreconditionError("estimate_lambda: tol must be positive");
    Vertex n = g.num_vertices();
    SpectralCertificate cert;
    cert.tolerance = opts.tol;
    cert.is_regular = g.is_regular();
    cert.d = g.degree_max();

    SpectralMethod method;
    if (opts.force_method) {
        method = *opts.force_method;
    } else {
        method = n <= opts.dense_cap ? SpectralMethod::dense_exact
                                     : SpectralMethod::power_deflated;
    }
    if (method == SpectralMethod::dense_exact && n > opts.dense_cap)
        throw PreconditionError("dense-exact requested for n=" + std::to_string(n) +
                                " above dense_cap=" + std::to_string(opts.dense_cap));
    if (method == SpectralMethod::power_deflated && !cert.is_regular)
        throw PreconditionError(
            "estimate_lambda: graph is not regular; deflation of the all-ones direction "
            "is exact only for regular graphs. Use the dense-exact method.");

    cert.method = method;
    if (n <= 1) {
        cert.lambda_est = 0.0;
        return cert;
    }
    if (method == SpectralMethod::dense_exact) {
        cert.lambda_est = lambda_dense_exact(g, opts.dense_cap);
        cert.iterations = 0;
        return cert;
    }

    double d = static_cast<double>(cert.d);
    Rng rng_hi(Rng::mix(opts.seed ^ 0x11));
    Rng rng_lo(Rng::mix(opts.seed ^ 0x22));
    // +dI drives toward the largest nontrivial eigenvalue, -(-dI) toward the
    // smallest; both spectra are nonnegative after the shift, so neither run
    // can stall on a +/- magnitude tie.
    PowerResult top = power_extreme(g, d, opts.tol, opts.max_iter, rng_hi);
    PowerResult bottom = power_extreme(g, -d, opts.tol, opts.max_iter, rng_lo);
    cert.lambda_est = std::max(std::abs(top.rayleigh), std::abs(bottom.rayleigh));
    cert.iterations = top.iterations + bottom.iterations;
    return cert;
}

namespace {

double eml_pair_slack(double e_bc, double szb, double szc, double d, double n, double lambda,
                      double* observed) {
    double expect = szb * szc * d / n;
    double dev = std::abs(e_bc - expect);
    double bound = lambda * std::sqrt(szb * szc);
    if (observed) *observed = dev;
    return bound - dev;
}

}  // namespace

ExpansionReport eml_audit(const Graph& g, double lambda, EmlMode mode, std::int64_t samples,
                          std::uint64_t seed, Vertex exhaustive_cap) {
    if (!g.is_regular()) throw PreconditionError("eml_audit requires a regular graph");
    Vertex n = g.num_vertices();
    double d = static_cast<double>(g.degree_min());
    ExpansionReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    constexpr std::size_t kKeepViolations = 16;

    auto record = [&](double slack, double observed, double bound, auto&& bvec, auto&& cvec) {
        report.worst_slack = std::min(report.worst_slack, slack);
        if (slack < 0) {
            ++report.violation_count;
            if (report.violations.size() < kKeepViolations)
                report.violations.push_back({bvec(), cvec(), observed, bound});
        }
        ++report.checked_pairs;
    };

    if (mode == EmlMode::exhaustive) {
        if (n > exhaustive_cap || n > 31)
            throw PreconditionError("exhaustive EML audit capped at n <= " +
                                    std::to_string(std::min<Vertex>(exhaustive_cap, 31)));
        std::vector<std::uint32_t> adj_mask(static_cast<std::size_t>(n), 0);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v : g.neighbors(u)) adj_mask[static_cast<std::size_t>(u)] |= 1u << v;
        std::uint32_t full = n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1);
        auto mask_vec = [n](std::uint32_t m) {
            std::vector<Vertex> out;
            for (Vertex v = 0; v < n; ++v)
                if (m & (1u << v)) out.push_back(v);
            return out;
        };
        // e(B,C) for fixed B as a function of C via per-vertex masks
        for (std::uint32_t b = 0; b <= full; ++b) {
            int szb = std::popcount(b);
            for (std::uint32_t c = 0; c <= full; ++c) {
                std::int64_t e_bc = 0;
                std::uint32_t rest = b;
                while (rest) {
                    int u = std::countr_zero(rest);
                    rest &= rest - 1;
                    e_bc += std::popcount(adj_mask[static_cast<std::size_t>(u)] & c);
                }
                double observed = 0.0;
                double szc = std::popcount(c);
                double slack = eml_pair_slack(static_cast<double>(e_bc), szb, szc, d,
                                              static_cast<double>(n), lambda, &observed);
                record(slack, observed, lambda * std::sqrt(szb * szc),
                       [&] { return mask_vec(b); }, [&] { return mask_vec(c); });
                if (c == full) break;
            }
            if (b == full) break;
        }
        return report;
    }

    // sampled mode: sizes drawn from a geometric-ish grid, sets uniformly
    Rng rng(seed);
    std::vector<Vertex> size_grid;
    for (Vertex s = 1; s <= n; s = std::max<Vertex>(s + 1, s * 2))
        size_grid.push_back(s);
    if (size_grid.empty() || size_grid.back() != n) size_grid.push_back(n);
    std::vector<Vertex> pool(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) pool[static_cast<std::size_t>(v)] = v;
    auto draw_set = [&](Vertex size) {
        // partial Fisher-Yates
        for (Vertex i = 0; i < size; ++i) {
            std::size_t j = static_cast<std::size_t>(i) +
                            static_cast<std::size_t>(rng.uniform(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        return VertexSet::of(n, std::span<const Vertex>(pool.data(), static_cast<std::size_t>(size)));
    };
    for (std::int64_t s = 0; s < samples; ++s) {
        Vertex szb = size_grid[rng.uniform(size_grid.size())];
        Vertex szc = size_grid[rng.uniform(size_grid.size())];
        VertexSet B = draw_set(szb);
        VertexSet C = draw_set(szc);
        double observed = 0.0;
        double slack = eml_pair_slack(static_cast<double>(e_count(g, B, C)),
                                      static_cast<double>(szb), static_cast<double>(szc), d,
                                      static_cast<double>(n), lambda, &observed);
        record(slack, observed, lambda * std::sqrt(double(szb) * double(szc)),
               [&] { return B.to_vector(); }, [&] { return C.to_vector(); });
    }
    return report;
}

bool lemma1_check(const Graph& g, const VertexSet& U, const VertexSet& X, double delta) {
    if (!X.is_subset_of(U)) throw PreconditionError("lemma1_check: X must be a subset of U");
    double n = static_cast<double>(g.num_vertices());
    if (static_cast<double>(X.count()) < delta * n)
        throw PreconditionError("lemma1_check: |X| >= delta*n required, got |X|=" +
                                std::to_string(X.count()));
    VertexSet n_in_u = nbhd_Gamma(g, X, U.minus(X));
    return static_cast<double>(n_in_u.count()) >
           static_cast<double>(U.count()) - static_cast<double>(X.count()) - delta * n;
}

bool lemma2_check(const Graph& g, const VertexSet& S, Vertex d1, const VertexSet& X,
                  double delta) {
    Vertex n = g.num_vertices();
    double d = static_cast<double>(g.degree_max());
    if (static_cast<double>(d1) < 2.0 * delta * d)
        throw PreconditionError("lemma2_check: d1 >= 2*delta*d required (d1=" +
                                std::to_string(d1) + ", 2*delta*d=" + std::to_string(2 * delta * d) +
                                ")");
    if (static_cast<double>(X.count()) > delta * static_cast<double>(n))
        throw PreconditionError("lemma2_check: |X| <= delta*n required, got |X|=" +
                                std::to_string(X.count()));
    for (Vertex v = 0; v < n; ++v) {
        Vertex into_s = 0;
        for (Vertex w : g.neighbors(v))
            if (S.contains(w)) ++into_s;
        if (into_s < d1)
            throw PreconditionError("lemma2_check: vertex " + std::to_string(v) + " has only " +
                                    std::to_string(into_s) + " neighbors in S, need >= " +
                                    std::to_string(d1));
    }
    double a = static_cast<double>(d1) / (2.0 * delta * d);
    VertexSet gamma = nbhd_Gamma(g, X, S);
    return static_cast<double>(gamma.count()) >= a * static_cast<double>(X.count());
}

}  // namespace crown
