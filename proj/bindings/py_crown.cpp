#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crown/certificate.hpp"
#include "crown/certify.hpp"
#include "crown/embedder.hpp"
#include "crown/generators.hpp"
#include "crown/graph.hpp"
#include "crown/matchmaker.hpp"
#include "crown/pipeline.hpp"
#include "crown/spectral.hpp"

namespace py = pybind11;
using namespace crown;

namespace {

Graph graph_from_edges(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (auto [u, v] : edges) es.push_back({u, v});
    return Graph::build(n, es);
}

std::vector<std::pair<Vertex, Vertex>> edges_out(const Graph& g) {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (const Edge& e : g.edge_list()) out.emplace_back(e.u, e.v);
    return out;
}

Crown crown_from_pairs(const std::vector<Vertex>& cycle,
                       const std::vector<std::pair<Vertex, Vertex>>& spikes) {
    Crown c;
    c.cycle = cycle;
    for (auto [u, v] : spikes) c.spikes.push_back({u, v});
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spanning crowns and square-Hamilton certificates in expander graphs";

    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    static py::exception<StageFailure> stage_exc(m, "StageFailureError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const StageFailure& f) {
            std::string msg = std::string(f.what());
            if (!f.diagnostics.empty()) msg += " | " + f.diagnostics;
            py::set_error(stage_exc, msg.c_str());
        }
    });

    py::class_<Graph>(m, "Graph")
        .def(py::init(&graph_from_edges), py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &Graph::num_vertices)
        .def_property_readonly("m", &Graph::num_edges)
        .def_property_readonly("degree_min", &Graph::degree_min)
        .def_property_readonly("degree_max", &Graph::degree_max)
        .def_property_readonly("is_regular", &Graph::is_regular)
        .def("degree", &Graph::degree, py::arg("v"))
        .def("neighbors",
             [](const Graph& g, Vertex v) {
                 auto nb = g.neighbors(v);
                 return std::vector<Vertex>(nb.begin(), nb.end());
             },
             py::arg("v"))
        .def("has_edge", &Graph::has_edge, py::arg("u"), py::arg("v"))
        .def("edges", &edges_out)
        .def("content_hash", &Graph::content_hash)
        .def("__repr__", [](const Graph& g) {
            return "<Graph n=" + std::to_string(g.num_vertices()) +
                   " m=" + std::to_string(g.num_edges()) + ">";
        });

    m.def("load_edge_list", &read_edge_list_file, py::arg("path"));
    m.def("save_edge_list", &write_edge_list_file, py::arg("path"), py::arg("graph"));

    m.def("random_regular", &random_regular, py::arg("n"), py::arg("d"), py::arg("seed") = 1);
    m.def("paley", &paley, py::arg("q"));
    m.def(
        "crown_fixture",
        [](Vertex cycle_len, const std::vector<Vertex>& positions) {
            auto [g, c] = crown_fixture(cycle_len, positions);
            std::vector<std::pair<Vertex, Vertex>> spikes;
            for (const Edge& s : c.spikes) spikes.emplace_back(s.u, s.v);
            return py::make_tuple(g, py::make_tuple(c.cycle, spikes));
        },
        py::arg("cycle_len"), py::arg("spike_positions"));

    m.def(
        "estimate_lambda",
        [](const Graph& g, double tol, Vertex dense_cap, const std::string& method) {
            SpectralOptions opts;
            opts.tol = tol;
            opts.dense_cap = dense_cap;
            if (method == "power-deflated")
                opts.force_method = SpectralMethod::power_deflated;
            else if (method == "dense-exact")
                opts.force_method = SpectralMethod::dense_exact;
            else if (method != "auto")
                throw PreconditionError("method must be auto | power-deflated | dense-exact");
            SpectralCertificate c = estimate_lambda(g, opts);
            py::dict out;
            out["lambda_est"] = c.lambda_est;
            out["tolerance"] = c.tolerance;
            out["iterations"] = c.iterations;
            out["method"] = to_string(c.method);
            out["is_regular"] = c.is_regular;
            out["d"] = c.d;
            return out;
        },
        py::arg("graph"), py::arg("tol") = 1e-12, py::arg("dense_cap") = 256,
        py::arg("method") = "auto");

    m.def(
        "eml_audit",
        [](const Graph& g, double lambda, const std::string& mode, std::int64_t samples,
           std::uint64_t seed) {
            ExpansionReport r =
                eml_audit(g, lambda, mode == "exhaustive" ? EmlMode::exhaustive : EmlMode::sampled,
                          samples, seed);
            py::dict out;
            out["checked_pairs"] = r.checked_pairs;
            out["worst_slack"] = r.worst_slack;
            out["violations"] = r.violation_count;
            return out;
        },
        py::arg("graph"), py::arg("lambda_bound"), py::arg("mode") = "sampled",
        py::arg("samples") = 1000, py::arg("seed") = 1);

    m.def(
        "split_matchmakers",
        [](const Graph& g, double delta1, std::uint64_t seed, std::int64_t max_resamples) {
            if (max_resamples < 0) max_resamples = 10 * g.num_vertices();
            MatchmakerTriple t = split_matchmakers(g, delta1, seed, max_resamples);
            py::dict out;
            out["s1"] = t.s1.to_vector();
            out["s2"] = t.s2.to_vector();
            out["s3"] = t.s3.to_vector();
            out["K"] = t.color_count;
            out["threshold"] = t.threshold;
            out["guaranteed_deg"] = t.guaranteed_deg;
            out["resamples"] = t.resamples_used;
            return out;
        },
        py::arg("graph"), py::arg("delta1") = 0.048, py::arg("seed") = 0,
        py::arg("max_resamples") = -1);

    m.def(
        "run_pipeline",
        [](const Graph& g, double delta, py::object delta1, std::uint64_t seed, bool force) {
            RunConfig cfg;
            cfg.delta = delta;
            if (!delta1.is_none()) cfg.delta1 = delta1.cast<double>();
            cfg.seed = seed;
            cfg.force = force;
            PipelineResult r = run_pipeline(g, cfg);
            std::vector<std::pair<Vertex, Vertex>> spikes;
            for (const Edge& s : r.crown.spikes) spikes.emplace_back(s.u, s.v);
            py::dict out;
            out["cycle"] = r.crown.cycle;
            out["spikes"] = spikes;
            out["square_hamilton_order"] = r.square_order.order;
            out["lambda_est"] = r.spectral.lambda_est;
            return out;
        },
        py::arg("graph"), py::arg("delta") = 0.001, py::arg("delta1") = py::none(),
        py::arg("seed") = 0, py::arg("force") = false);

    m.def(
        "verify_crown",
        [](const Graph& g, const std::vector<Vertex>& cycle,
           const std::vector<std::pair<Vertex, Vertex>>& spikes, bool require_spanning) {
            CrownReport r = verify_crown(g, crown_from_pairs(cycle, spikes), require_spanning);
            py::dict out;
            out["valid"] = r.valid;
            out["spanning"] = r.spanning;
            out["spike_count_ok"] = r.spike_count_ok;
            out["violations"] = r.violations;
            return out;
        },
        py::arg("graph"), py::arg("cycle"), py::arg("spikes"), py::arg("require_spanning") = true);

    m.def(
        "square_hamilton_order",
        [](Vertex n, const std::vector<Vertex>& cycle,
           const std::vector<std::pair<Vertex, Vertex>>& spikes) {
            return square_hamilton_order(crown_from_pairs(cycle, spikes), n).order;
        },
        py::arg("n"), py::arg("cycle"), py::arg("spikes"));

    m.def(
        "verify_square_hamilton",
        [](const Graph& g, const std::vector<Vertex>& order) {
            SquareHamiltonCertificate cert{order};
            SquareHamiltonCheck c = verify_square_hamilton(g, cert);
            py::dict out;
            out["ok"] = c.ok;
            out["reason"] = c.reason;
            out["witness"] = py::make_tuple(c.witness_a, c.witness_b);
            return out;
        },
        py::arg("graph"), py::arg("order"));
}
