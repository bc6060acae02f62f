#include "cdde/error.hpp"

namespace cdde {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotMetzler: return "NotMetzler";
        case ErrorCode::NotNonnegative: return "NotNonnegative";
        case ErrorCode::NotStable: return "NotStable";
        case ErrorCode::DecayRateTooLarge: return "DecayRateTooLarge";
        case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
        case ErrorCode::NonpositiveThreshold: return "NonpositiveThreshold";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::NegativeTime: return "NegativeTime";
        case ErrorCode::UnstableStep: return "UnstableStep";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::MismatchedScenarios: return "MismatchedScenarios";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& what, int step) {
    std::string msg(to_string(code));
    if (step > 0) msg += " (step " + std::to_string(step) + ")";
    msg += ": ";
    msg += what;
    return msg;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what, int pipeline_step)
    : std::runtime_error(decorate(code, what, pipeline_step)), code_(code), step_(pipeline_step) {}

}  // namespace cdde
