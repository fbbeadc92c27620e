#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crown/graph.hpp"

namespace crown {

enum class SpectralMethod { power_deflated, dense_exact };

std::string to_string(SpectralMethod m);

// Certified estimate of lambda = max_{i>=2} |lambda_i| of the adjacency
// matrix of a regular graph.
struct SpectralCertificate {
    double lambda_est = 0.0;
    double tolerance = 0.0;
    std::int64_t iterations = 0;
    SpectralMethod method = SpectralMethod::dense_exact;
    bool is_regular = false;
    Vertex d = 0;
};

struct SpectralOptions {
    double tol = 1e-12;
    std::int64_t max_iter = 200000;
    Vertex dense_cap = 256;  // n <= dense_cap uses the exact dense path
    std::optional<SpectralMethod> force_method;
    std::uint64_t seed = 0x5eedULL;
};

// Power iteration on the adjacency operator restricted to the orthogonal
// complement of the all-ones vector (re-orthogonalized every step), run once
// shifted by +dI and once by -dI to bracket both spectral ends; falls back
// to a dense eigensolve when n <= dense_cap. Rejects non-regular input.
SpectralCertificate estimate_lambda(const Graph& g, const SpectralOptions& opts = {});

// Exact max_{i>=2} |lambda_i| via dense symmetric eigensolve; test oracle.
double lambda_dense_exact(const Graph& g, Vertex cap = 4096);

// Raised when the Rayleigh quotient fails to settle within max_iter.
struct PowerIterationError : std::runtime_error {
    double bracket_lo, bracket_hi;
    PowerIterationError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
};

enum class EmlMode { exhaustive, sampled };

struct EmlViolation {
    std::vector<Vertex> B, C;
    double observed = 0.0;  // |e(B,C) - |B||C|d/n|
    double bound = 0.0;     // lambda * sqrt(|B||C|)
};

struct ExpansionReport {
    std::int64_t checked_pairs = 0;
    double worst_slack = 0.0;  // min over pairs of bound - observed
    std::int64_t violation_count = 0;
    std::vector<EmlViolation> violations;  // capped sample of the violations
};

// Audits |e(B,C) - |B||C|d/n| <= lambda*sqrt(|B||C|) over subset pairs.
// Exhaustive mode enumerates all pairs (n <= cap); sampled mode draws subset
// sizes from a grid and sets uniformly. Violations are reported, not thrown.
ExpansionReport eml_audit(const Graph& g, double lambda, EmlMode mode,
                          std::int64_t samples = 1000, std::uint64_t seed = 1,
                          Vertex exhaustive_cap = 14);

// For X inside U with |X| >= delta*n: checks |N(X, U\X)| > |U| - |X| - delta*n.
bool lemma1_check(const Graph& g, const VertexSet& U, const VertexSet& X, double delta);

// Requires every vertex to have >= d1 neighbors in S, d1 >= 2*delta*d and
// |X| <= delta*n; checks |Gamma(X,S)| >= (d1 / (2*delta*d)) * |X|.
bool lemma2_check(const Graph& g, const VertexSet& S, Vertex d1, const VertexSet& X,
                  double delta);

}  // namespace crown
