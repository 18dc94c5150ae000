#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dualbound {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonFinite,
    DerivativeMismatch,
    RiccatiBlowup,
    ParameterDomain,
    AllCandidatesInvalid,
    MismatchedProblem,
    UnknownProblem,
    UnknownFamily,
    InvalidConfig,
    IoError,
};

// Machine-readable name, e.g. "UNKNOWN_PROBLEM".
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dualbound
