#include "cvfp/error.hpp"

namespace cvfp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::AmbiguousProjection: return "AmbiguousProjection";
        case ErrorKind::NotUnitNormal: return "NotUnitNormal";
        case ErrorKind::InvalidExponent: return "InvalidExponent";
        case ErrorKind::QuadratureNonConvergent: return "QuadratureNonConvergent";
        case ErrorKind::WatchdogExceeded: return "WatchdogExceeded";
        case ErrorKind::InvalidStart: return "InvalidStart";
        case ErrorKind::InvalidInitial: return "InvalidInitial";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::CFLViolated: return "CFLViolated";
        case ErrorKind::NegativeDensity: return "NegativeDensity";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::DegenerateTrace: return "DegenerateTrace";
        case ErrorKind::BoxMismatch: return "BoxMismatch";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    }
    return "Unknown";
}

}  // namespace cvfp
