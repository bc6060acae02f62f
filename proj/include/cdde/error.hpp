#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdde {

enum class ErrorCode {
    SingularMatrix,
    DimensionMismatch,
    NonFinite,
    NotMetzler,
    NotNonnegative,
    NotStable,
    DecayRateTooLarge,
    EmptyIndexSet,
    NonpositiveThreshold,
    HypothesisViolated,
    NegativeTime,
    UnstableStep,
    InvalidScenario,
    MismatchedScenarios,
    InvalidArgument,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library. `pipeline_step` names the stage of
// the certificate pipeline that raised it (0 when raised outside the pipeline).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, int pipeline_step = 0);

    ErrorCode code() const noexcept { return code_; }
    int pipeline_step() const noexcept { return step_; }

private:
    ErrorCode code_;
    int step_;
};

}  // namespace cdde
