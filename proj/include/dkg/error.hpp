/**
 * @file error.hpp
 * @brief Error codes shared by every engine module.
 *
 * Domain failures are reported by throwing dkg::Error. The code is the
 * machine-readable part; the CLI prints it on its error line and the HTTP
 * service maps it onto a status code.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dkg {

enum class ErrorCode {
    // graph_core
    DuplicateIdWithConflict,
    InvalidField,
    MissingEndpoint,
    InvalidWeight,
    CapacityExceeded,
    EdgeNotFound,
    NodeNotFound,
    InvalidProbability,
    SchemaVersionMismatch,
    CorruptDocument,
    // extraction
    UnknownContextTag,
    RemoteTransport,
    RemoteSchema,
    // fusion
    InvalidCounts,
    ElementNotFound,
    // reasoning
    NotADisease,
    EmptySymptomSet,
    NoDiseases,
    NoOptions,
    NoFeasiblePlan,
    DiseaseNotFound,
    // feedback
    NoLikertData,
    InvalidFeedback,
    // evalkit
    UndefinedMetric,
    LengthMismatch,
    EmptyInput,
    EmptyGroundTruth,
    DegenerateMarginals,
    ZeroVariance,
    InvalidSizes,
    // gateway
    InvalidConfig,
    UsageError,
    IoError,
    BindFailure,
    RouteNotFound,
};

/// Stable name used on the wire ("EmptySymptomSet", ...).
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Pipeline phase that raised the error, empty outside run_pipeline.
    const std::string& phase() const noexcept { return phase_; }

    Error with_phase(std::string phase) const {
        Error copy = *this;
        copy.phase_ = std::move(phase);
        return copy;
    }

private:
    ErrorCode code_;
    std::string phase_;
};

}  // namespace dkg
