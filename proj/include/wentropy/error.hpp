#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wentropy {

enum class ErrorCode {
    NotSymmetric,
    NotPositiveDefinite,
    SingularGivenBlock,
    DimensionMismatch,
    DomainError,
    OrderCapExceeded,
    OddOrder,
    GridTooCoarse,
    SupportMismatch,
    InvalidArgument,
    OutOfSupport,
    EmptyDraws,
    ZeroAcceptance,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularGivenBlock: return "SingularGivenBlock";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorCode::OddOrder: return "OddOrder";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::EmptyDraws: return "EmptyDraws";
    case ErrorCode::ZeroAcceptance: return "ZeroAcceptance";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library. The code identifies the failure
/// class; what() carries the detail (offending entry, bound, row, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wentropy
