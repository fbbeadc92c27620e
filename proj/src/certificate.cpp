#include "crown/certificate.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace crown {

using nlohmann::json;

std::string format_graph_hash(std::uint64_t h) {
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

namespace {

json config_json(const RunConfig& config) {
    return json{{"delta", config.delta},
                {"delta1", config.effective_delta1()},
                {"seed", config.seed},
                {"force", config.force},
                {"budgets",
                 {{"resample_factor", config.budgets.resample_factor},
                  {"backtrack", config.budgets.backtrack},
                  {"consumption_cap_factor", config.budgets.consumption_cap_factor},
                  {"broom_cap_factor", config.budgets.broom_cap_factor}}}};
}

json graph_json(const Graph& g) {
    return json{{"n", g.num_vertices()},
                {"m", g.num_edges()},
                {"hash", format_graph_hash(g.content_hash())}};
}

json stages_json(const std::vector<StageStat>& stages) {
    json arr = json::array();
    for (const StageStat& s : stages) {
        json o{{"name", s.name}};
        for (const auto& [k, v] : s.nums) o[k] = v;
        for (const auto& [k, v] : s.notes) o[k] = v;
        arr.push_back(std::move(o));
    }
    return arr;
}

}  // namespace

void write_certificate(std::ostream& out, const Graph& g, const RunConfig& config,
                       const PipelineResult& result) {
    json spikes = json::array();
    for (const Edge& s : result.crown.spikes)
        spikes.push_back(json::array({s.u, s.v}));
    json cert{
        {"schema_version", 1},
        {"kind", "crown"},
        {"graph", graph_json(g)},
        {"config", config_json(config)},
        {"spectral",
         {{"lambda_est", result.spectral.lambda_est},
          {"tolerance", result.spectral.tolerance},
          {"iterations", result.spectral.iterations},
          {"method", to_string(result.spectral.method)},
          {"d", result.spectral.d}}},
        {"matchmakers",
         {{"K", result.matchmakers.color_count},
          {"threshold", result.matchmakers.threshold},
          {"guaranteed_deg", result.matchmakers.guaranteed_deg},
          {"resamples", result.matchmakers.resamples_used},
          {"s1", result.matchmakers.s1.to_vector()},
          {"s2", result.matchmakers.s2.to_vector()},
          {"s3", result.matchmakers.s3.to_vector()}}},
        {"stages", stages_json(result.stages)},
        {"crown", {{"cycle", result.crown.cycle}, {"spikes", std::move(spikes)}}},
        {"square_hamilton_order", result.square_order.order},
    };
    out << cert.dump(1) << '\n';
}

void write_failure_certificate(std::ostream& out, const Graph& g, const RunConfig& config,
                               const StageFailure& failure,
                               const std::vector<StageStat>& stages) {
    json cert{
        {"schema_version", 1},
        {"kind", "crown-failure"},
        {"graph", graph_json(g)},
        {"config", config_json(config)},
        {"failed_stage", failure.stage},
        {"error", failure.what()},
        {"diagnostics", failure.diagnostics},
        {"stages", stages_json(stages)},
    };
    out << cert.dump(1) << '\n';
}

namespace {

std::uint64_t parse_hash(const std::string& s) {
    const std::string prefix = "fnv1a64:";
    if (s.rfind(prefix, 0) != 0) throw MalformedCertificate("graph.hash: unknown hash scheme");
    return std::stoull(s.substr(prefix.size()), nullptr, 16);
}

}  // namespace

ParsedCertificate read_certificate(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedCertificate(std::string("certificate is not valid JSON: ") + e.what());
    }
    ParsedCertificate cert;
    try {
        cert.schema_version = doc.at("schema_version").get<int>();
        if (cert.schema_version != 1)
            throw MalformedCertificate("unsupported schema_version " +
                                       std::to_string(cert.schema_version));
        cert.kind = doc.at("kind").get<std::string>();
        cert.graph_hash = parse_hash(doc.at("graph").at("hash").get<std::string>());
        cert.n = doc.at("graph").at("n").get<Vertex>();
        if (cert.kind == "crown") {
            const json& crown = doc.at("crown");
            cert.crown.cycle = crown.at("cycle").get<std::vector<Vertex>>();
            for (const json& s : crown.at("spikes")) {
                if (!s.is_array() || s.size() != 2)
                    throw MalformedCertificate("crown.spikes: expected [u, v] pairs");
                cert.crown.spikes.push_back({s[0].get<Vertex>(), s[1].get<Vertex>()});
            }
            cert.square_order.order =
                doc.at("square_hamilton_order").get<std::vector<Vertex>>();
        } else if (cert.kind == "crown-failure") {
            cert.failed_stage = doc.at("failed_stage").get<std::string>();
        } else {
            throw MalformedCertificate("unknown certificate kind '" + cert.kind + "'");
        }
    } catch (const json::exception& e) {
        throw MalformedCertificate(std::string("certificate shape error: ") + e.what());
    }
    return cert;
}

ParsedCertificate read_certificate_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedCertificate("cannot open certificate file: " + path);
    return read_certificate(in);
}

}  // namespace crown
