#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace firth {

enum class ErrorCode {
    NonIntegerCount,
    CountOutOfRange,
    DimensionMismatch,
    EmptyData,
    NonFiniteInput,
    NonFiniteResult,
    CholeskyFailure,
    NoGradient,
    TooLargeForOracle,
    RankDeficient,
    LpInfeasible,
    LpUnbounded,
    LpNumericalFailure,
    ZeroRowNorm,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace firth
