#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "crown/certify.hpp"
#include "crown/pipeline.hpp"

namespace crown {

// The certificate file is unreadable or structurally wrong (CLI exit 2).
struct MalformedCertificate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a verifier needs from a success certificate; the verifier never
// touches pipeline code, only this parsed form.
struct ParsedCertificate {
    int schema_version = 0;
    std::string kind;  // "crown" or "crown-failure"
    std::uint64_t graph_hash = 0;
    Vertex n = 0;
    Crown crown;
    SquareHamiltonCertificate square_order;
    std::string failed_stage;  // for failure certificates
};

std::string format_graph_hash(std::uint64_t h);

// Success certificate: config, spectral summary, per-stage stats, the crown
// and the derived square-Hamilton order.
void write_certificate(std::ostream& out, const Graph& g, const RunConfig& config,
                       const PipelineResult& result);

// Failure certificate: stage name and diagnostics, plus whatever stage stats
// were collected before the failure. Never mixes with the success schema.
void write_failure_certificate(std::ostream& out, const Graph& g, const RunConfig& config,
                               const StageFailure& failure,
                               const std::vector<StageStat>& stages);

ParsedCertificate read_certificate(std::istream& in);
ParsedCertificate read_certificate_file(const std::string& path);

}  // namespace crown
