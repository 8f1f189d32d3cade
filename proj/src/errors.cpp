#include "sublin/errors.hpp"

namespace sublin {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DegenerateInterval: return "DegenerateInterval";
        case ErrorKind::TooFewNodes: return "TooFewNodes";
        case ErrorKind::InvalidDimension: return "InvalidDimension";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::DomainMismatch: return "DomainMismatch";
        case ErrorKind::UnsupportedBC: return "UnsupportedBC";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::MissingRegion: return "MissingRegion";
        case ErrorKind::NoPositiveEigenvalue: return "NoPositiveEigenvalue";
        case ErrorKind::NonconvergedBisection: return "NonconvergedBisection";
        case ErrorKind::OrderViolation: return "OrderViolation";
        case ErrorKind::NotSubsolution: return "NotSubsolution";
        case ErrorKind::NotSupersolution: return "NotSupersolution";
        case ErrorKind::BallNotPositive: return "BallNotPositive";
        case ErrorKind::BallIntersectsPositive: return "BallIntersectsPositive";
        case ErrorKind::ZeroField: return "ZeroField";
        case ErrorKind::NegativeValues: return "NegativeValues";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::B1B2Violation: return "B1B2Violation";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace sublin
