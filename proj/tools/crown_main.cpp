// crown: build and verify spanning crowns (cycle + spike matching) in
// near-regular expander graphs, certifying Hamiltonicity of the square.
//
// Subcommands: generate | analyze | split | crown | verify | demo

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "crown/certificate.hpp"
#include "crown/certify.hpp"
#include "crown/embedder.hpp"
#include "crown/generators.hpp"
#include "crown/graph.hpp"
#include "crown/matchmaker.hpp"
#include "crown/pipeline.hpp"
#include "crown/spectral.hpp"

namespace {

int worker_count() {
    if (const char* env = std::getenv("CROWN_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(4u, hw));
}

std::vector<crown::Vertex> parse_positions(const std::string& csv) {
    std::vector<crown::Vertex> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(static_cast<crown::Vertex>(std::stol(tok)));
    }
    return out;
}

void print_analysis(const crown::Graph& g, double tol, crown::Vertex dense_cap,
                    std::int64_t eml_samples, std::uint64_t seed) {
    using namespace crown;
    std::cout << "n: " << g.num_vertices() << "\n"
              << "m: " << g.num_edges() << "\n"
              << "degree: " << g.degree_min() << ".." << g.degree_max()
              << (g.is_regular() ? " (regular)" : " (near-regular)") << "\n"
              << "hash: " << format_graph_hash(g.content_hash()) << "\n";
    if (!g.is_regular()) {
        std::cout << "lambda: skipped (non-regular; spectral audit needs a regular graph)\n";
        return;
    }
    SpectralOptions opts;
    opts.tol = tol;
    opts.dense_cap = dense_cap;
    SpectralCertificate cert = estimate_lambda(g, opts);
    std::cout << "lambda_est: " << cert.lambda_est << " (" << to_string(cert.method)
              << ", iterations " << cert.iterations << ", tol " << cert.tolerance << ")\n"
              << "lambda/d: " << cert.lambda_est / static_cast<double>(cert.d) << "\n";
    if (eml_samples > 0) {
        int workers = worker_count();
        ExpansionReport merged;
        merged.worst_slack = std::numeric_limits<double>::infinity();
        // fixed 64-sample blocks seeded by block index: the merged report does
        // not depend on the worker count
        std::int64_t blocks = (eml_samples + 63) / 64;
        std::vector<ExpansionReport> reports(static_cast<std::size_t>(blocks));
        std::vector<std::thread> pool;
        std::atomic<std::int64_t> next{0};
        double lambda = cert.lambda_est;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, lambda] {
                for (;;) {
                    std::int64_t b = next.fetch_add(1);
                    if (b >= blocks) return;
                    std::int64_t count = std::min<std::int64_t>(64, eml_samples - b * 64);
                    reports[static_cast<std::size_t>(b)] = eml_audit(
                        g, lambda, EmlMode::sampled, count, seed + static_cast<std::uint64_t>(b));
                }
            });
        for (auto& t : pool) t.join();
        for (const auto& r : reports) {
            merged.checked_pairs += r.checked_pairs;
            merged.violation_count += r.violation_count;
            merged.worst_slack = std::min(merged.worst_slack, r.worst_slack);
        }
        std::cout << "eml_sampled_pairs: " << merged.checked_pairs << "\n"
                  << "eml_violations: " << merged.violation_count << "\n"
                  << "eml_worst_slack: " << merged.worst_slack << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace crown;
    CLI::App app{"spanning crowns and square-Hamilton certificates in expander graphs"};
    app.require_subcommand(1);

    // ---- generate
    auto* gen = app.add_subcommand("generate", "generate a graph (edge-list format)");
    std::string family, out_path = "graph.el", spikes_csv;
    std::int64_t gen_n = 0, gen_d = 0, gen_q = 0, cycle_len = 0;
    std::uint64_t gen_seed = 1;
    bool analyze_after = false;
    gen->add_option("--family", family, "random-regular | paley | fixture")->required();
    gen->add_option("--n", gen_n, "vertex count (random-regular)");
    gen->add_option("--d", gen_d, "degree (random-regular)");
    gen->add_option("--q", gen_q, "prime = 1 mod 4 (paley)");
    gen->add_option("--cycle", cycle_len, "cycle length (fixture)");
    gen->add_option("--spikes", spikes_csv, "comma-separated spike positions (fixture)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", out_path, "output edge-list path");
    gen->add_flag("--analyze", analyze_after, "print degree and lambda summary");

    // ---- analyze
    auto* ana = app.add_subcommand("analyze", "degree/lambda/EML summary of a graph");
    std::string ana_graph;
    double ana_tol = 1e-10;
    std::int64_t ana_samples = 0;
    std::int64_t ana_dense_cap = 256;
    std::uint64_t ana_seed = 1;
    ana->add_option("graph", ana_graph, "edge-list file")->required();
    ana->add_option("--tol", ana_tol, "power-iteration tolerance");
    ana->add_option("--dense-cap", ana_dense_cap, "dense-exact fallback bound");
    ana->add_option("--eml-samples", ana_samples, "sampled EML audit size (0 = skip)");
    ana->add_option("--seed", ana_seed, "audit seed");

    // ---- split
    auto* spl = app.add_subcommand("split", "run the matchmaker splitting only");
    std::string spl_graph;
    double spl_delta1 = 0.048;
    std::uint64_t spl_seed = 0;
    std::int64_t spl_max = -1;
    spl->add_option("graph", spl_graph, "edge-list file")->required();
    spl->add_option("--delta1", spl_delta1, "class-size fraction bound");
    spl->add_option("--seed", spl_seed, "seed");
    spl->add_option("--max-resamples", spl_max, "budget (default 10*n)");

    // ---- crown
    auto* crn = app.add_subcommand("crown", "run the full pipeline, write a certificate");
    std::string crn_graph, crn_out = "crown.json";
    RunConfig config;
    double crn_delta1 = -1.0;
    crn->add_option("graph", crn_graph, "edge-list file")->required();
    crn->add_option("-o,--out", crn_out, "certificate output path");
    crn->add_option("--delta", config.delta, "spectral ratio bound (default 0.001)");
    crn->add_option("--delta1", crn_delta1, "matchmaker fraction (default 48*delta)");
    crn->add_option("--seed", config.seed, "run seed");
    crn->add_option("--resample-factor", config.budgets.resample_factor,
                    "matchmaker budget = factor*n");
    crn->add_option("--backtrack", config.budgets.backtrack, "embedding backtrack budget");
    crn->add_option("--audit-samples", config.audit_samples, "sampled audit size per stage");
    crn->add_option("--lambda-tol", config.lambda_tol, "power-iteration tolerance");
    crn->add_flag("--force", config.force, "run even when lambda/d > delta");

    // ---- verify
    auto* ver = app.add_subcommand("verify", "verify a certificate against a graph");
    std::string ver_graph, ver_cert;
    ver->add_option("graph", ver_graph, "edge-list file")->required();
    ver->add_option("certificate", ver_cert, "certificate JSON")->required();

    // ---- demo
    auto* dem = app.add_subcommand("demo", "end-to-end run on a built-in Paley instance");
    std::int64_t demo_q = 2029;
    std::uint64_t demo_seed = 1;
    dem->add_option("--q", demo_q, "Paley prime (default 2029)");
    dem->add_option("--seed", demo_seed, "run seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Graph g;
            Crown fixture_crown;
            bool has_fixture = false;
            if (family == "random-regular") {
                g = random_regular(static_cast<Vertex>(gen_n), static_cast<Vertex>(gen_d),
                                   gen_seed);
            } else if (family == "paley") {
                g = paley(static_cast<Vertex>(gen_q));
            } else if (family == "fixture") {
                auto positions = parse_positions(spikes_csv);
                auto [fg, fc] = crown_fixture(static_cast<Vertex>(cycle_len), positions);
                g = std::move(fg);
                fixture_crown = std::move(fc);
                has_fixture = true;
            } else {
                std::cerr << "unknown family '" << family << "'\n";
                return 2;
            }
            write_edge_list_file(out_path, g);
            std::cout << "wrote " << out_path << " (n=" << g.num_vertices()
                      << ", m=" << g.num_edges() << ")\n";
            if (has_fixture) {
                // ground-truth certificate next to the graph
                std::string cert_path = out_path + ".cert.json";
                PipelineResult r;
                r.crown = fixture_crown;
                r.square_order = square_hamilton_order(fixture_crown, g.num_vertices());
                r.spectral.d = g.degree_max();
                r.matchmakers.s1 = VertexSet(g.num_vertices());
                r.matchmakers.s2 = VertexSet(g.num_vertices());
                r.matchmakers.s3 = VertexSet(g.num_vertices());
                r.matchmakers.color_count = 3;
                RunConfig fixture_cfg;
                fixture_cfg.delta1 = 0.3;
                std::ofstream out(cert_path);
                write_certificate(out, g, fixture_cfg, r);
                std::cout << "wrote " << cert_path << " (ground-truth crown, "
                          << fixture_crown.spikes.size() << " spikes)\n";
            }
            if (analyze_after) print_analysis(g, 1e-10, 256, 0, gen_seed);
            return 0;
        }

        if (ana->parsed()) {
            Graph g = read_edge_list_file(ana_graph);
            print_analysis(g, ana_tol, static_cast<Vertex>(ana_dense_cap), ana_samples,
                           ana_seed);
            return 0;
        }

        if (spl->parsed()) {
            Graph g = read_edge_list_file(spl_graph);
            std::int64_t budget = spl_max >= 0 ? spl_max : 10 * g.num_vertices();
            MatchmakerTriple t = split_matchmakers(g, spl_delta1, spl_seed, budget);
            std::cout << "K: " << t.color_count << "\nthreshold: " << t.threshold
                      << "\nguaranteed_deg: " << t.guaranteed_deg
                      << "\nresamples: " << t.resamples_used << "\n|S1| |S2| |S3|: "
                      << t.s1.count() << " " << t.s2.count() << " " << t.s3.count() << "\n";
            return 0;
        }

        if (crn->parsed() || dem->parsed()) {
            Graph g;
            if (dem->parsed()) {
                g = paley(static_cast<Vertex>(demo_q));
                config = RunConfig{};
                config.seed = demo_seed;
                config.delta = 0.025;
                config.delta1 = 0.25;
                crn_out = "demo-crown.json";
                double ratio = (std::sqrt(static_cast<double>(demo_q)) + 1.0) / 2.0 /
                               static_cast<double>(g.degree_min());
                std::cout << "demo: Paley(" << demo_q << "), lambda/d = " << ratio
                          << ", delta = " << config.delta << "\n";
            } else {
                g = read_edge_list_file(crn_graph);
                if (crn_delta1 > 0) config.delta1 = crn_delta1;
            }
            try {
                auto started = std::chrono::steady_clock::now();
                PipelineResult result = run_pipeline(g, config);
                auto elapsed = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();
                std::ofstream out(crn_out);
                if (!out) {
                    std::cerr << "cannot write " << crn_out << "\n";
                    return 2;
                }
                write_certificate(out, g, config, result);
                std::cout << "crown: cycle " << result.crown.cycle.size() << ", spikes "
                          << result.crown.spikes.size() << ", wrote " << crn_out << " ("
                          << elapsed << "s)\n";
                for (const StageStat& s : result.stages) {
                    std::cout << "  [" << s.name << "]";
                    for (const auto& [k, v] : s.nums) std::cout << " " << k << "=" << v;
                    for (const auto& [k, v] : s.notes) std::cout << " " << k << "=" << v;
                    std::cout << "\n";
                }
                return 0;
            } catch (const StageFailure& f) {
                std::ofstream out(crn_out);
                if (out) write_failure_certificate(out, g, config, f, {});
                std::cerr << "stage failure [" << f.stage << "]: " << f.what() << "\n";
                if (!f.diagnostics.empty()) std::cerr << "  " << f.diagnostics << "\n";
                std::cerr << "partial certificate written to " << crn_out << "\n";
                return 1;
            }
        }

        if (ver->parsed()) {
            Graph g = read_edge_list_file(ver_graph);
            ParsedCertificate cert;
            try {
                cert = read_certificate_file(ver_cert);
            } catch (const MalformedCertificate& e) {
                std::cerr << "malformed certificate: " << e.what() << "\n";
                return 2;
            }
            if (cert.kind != "crown") {
                std::cerr << "certificate records a stage failure at '" << cert.failed_stage
                          << "', nothing to verify\n";
                return 1;
            }
            if (cert.graph_hash != g.content_hash()) {
                std::cerr << "invalid: graph-hash-mismatch (certificate "
                          << format_graph_hash(cert.graph_hash) << ", graph "
                          << format_graph_hash(g.content_hash()) << ")\n";
                return 1;
            }
            CrownReport report = verify_crown(g, cert.crown, /*require_spanning=*/true);
            if (!report.valid) {
                std::cerr << "invalid crown:\n";
                for (const auto& v : report.violations) std::cerr << "  - " << v << "\n";
                return 1;
            }
            SquareHamiltonCheck sq = verify_square_hamilton(g, cert.square_order);
            if (!sq.ok) {
                std::cerr << "invalid square-Hamilton order: " << sq.reason;
                if (sq.witness_a >= 0)
                    std::cerr << " (witness " << sq.witness_a << "," << sq.witness_b << ")";
                std::cerr << "\n";
                return 1;
            }
            std::cout << "valid: crown with " << cert.crown.spikes.size()
                      << " spikes; square-Hamilton order checks out\n";
            return 0;
        }
    } catch (const MatchmakerError& e) {
        std::cerr << "matchmaker failed: " << e.what() << "\n";
        return 1;
    } catch (const PreconditionError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 2;
    } catch (const StageFailure& e) {
        std::cerr << "failed [" << e.stage << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
