#pragma once

#include <stdexcept>
#include <string>

namespace rwcredit {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveDiffusion : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct InvalidInterval : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };
struct BadInterval : Error { using Error::Error; };
struct CurveOutOfRange : Error { using Error::Error; };
struct SpreadTooLarge : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct SeriesDivergence : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct MonotonicityViolation : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct NonPositiveSpread : Error { using Error::Error; };
struct NonPositiveDiscountFactor : Error { using Error::Error; };
struct DegenerateState : Error { using Error::Error; };
struct TooFewPaths : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

/// Raised when a calibration target lies below the attainable range.
/// Carries the offending target index and the smallest attainable value.
struct InfeasibleTarget : Error {
    std::size_t index;
    double min_attainable;
    InfeasibleTarget(std::size_t i, double min_c, const std::string& msg)
        : Error(msg), index(i), min_attainable(min_c) {}
};

}  // namespace rwcredit
