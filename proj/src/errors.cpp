#include "dualbound/errors.hpp"

namespace dualbound {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::NonFinite: return "NON_FINITE";
        case ErrorCode::DerivativeMismatch: return "DERIVATIVE_MISMATCH";
        case ErrorCode::RiccatiBlowup: return "RICCATI_BLOWUP";
        case ErrorCode::ParameterDomain: return "PARAMETER_DOMAIN";
        case ErrorCode::AllCandidatesInvalid: return "ALL_CANDIDATES_INVALID";
        case ErrorCode::MismatchedProblem: return "MISMATCHED_PROBLEM";
        case ErrorCode::UnknownProblem: return "UNKNOWN_PROBLEM";
        case ErrorCode::UnknownFamily: return "UNKNOWN_FAMILY";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

}  // namespace dualbound
