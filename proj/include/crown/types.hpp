#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace crown {

using Vertex = std::int32_t;

// Rejected input or violated operation precondition.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A pipeline stage (or stage-like operation) could not complete. Carries the
// stage name and a human-readable diagnostics blob for the failure report.
struct StageFailure : std::runtime_error {
    std::string stage;
    std::string diagnostics;

    StageFailure(std::string stage_name, const std::string& what, std::string diag = {})
        : std::runtime_error(stage_name + ": " + what),
          stage(std::move(stage_name)),
          diagnostics(std::move(diag)) {}
};

}  // namespace crown
