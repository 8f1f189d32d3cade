#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sublin {

enum class ErrorKind {
    DegenerateInterval,
    TooFewNodes,
    InvalidDimension,
    NonFinite,
    GridMismatch,
    DomainMismatch,
    UnsupportedBC,
    InvalidArgument,
    MissingRegion,
    NoPositiveEigenvalue,
    NonconvergedBisection,
    OrderViolation,
    NotSubsolution,
    NotSupersolution,
    BallNotPositive,
    BallIntersectsPositive,
    ZeroField,
    NegativeValues,
    NotPositive,
    DegenerateDenominator,
    B1B2Violation,
    Config,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sublin
