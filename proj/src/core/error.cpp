#include "dkg/error.hpp"

namespace dkg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DuplicateIdWithConflict: return "DuplicateIdWithConflict";
        case ErrorCode::InvalidField: return "InvalidField";
        case ErrorCode::MissingEndpoint: return "MissingEndpoint";
        case ErrorCode::InvalidWeight: return "InvalidWeight";
        case ErrorCode::CapacityExceeded: return "CapacityExceeded";
        case ErrorCode::EdgeNotFound: return "EdgeNotFound";
        case ErrorCode::NodeNotFound: return "NodeNotFound";
        case ErrorCode::InvalidProbability: return "InvalidProbability";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::CorruptDocument: return "CorruptDocument";
        case ErrorCode::UnknownContextTag: return "UnknownContextTag";
        case ErrorCode::RemoteTransport: return "RemoteTransport";
        case ErrorCode::RemoteSchema: return "RemoteSchema";
        case ErrorCode::InvalidCounts: return "InvalidCounts";
        case ErrorCode::ElementNotFound: return "ElementNotFound";
        case ErrorCode::NotADisease: return "NotADisease";
        case ErrorCode::EmptySymptomSet: return "EmptySymptomSet";
        case ErrorCode::NoDiseases: return "NoDiseases";
        case ErrorCode::NoOptions: return "NoOptions";
        case ErrorCode::NoFeasiblePlan: return "NoFeasiblePlan";
        case ErrorCode::DiseaseNotFound: return "DiseaseNotFound";
        case ErrorCode::NoLikertData: return "NoLikertData";
        case ErrorCode::InvalidFeedback: return "InvalidFeedback";
        case ErrorCode::UndefinedMetric: return "UndefinedMetric";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
        case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::InvalidSizes: return "InvalidSizes";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BindFailure: return "BindFailure";
        case ErrorCode::RouteNotFound: return "RouteNotFound";
    }
    return "Unknown";
}

}  // namespace dkg
