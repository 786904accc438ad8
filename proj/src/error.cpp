#include "irslab/error.hpp"

namespace irslab {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::AmbiguousClass: return "AmbiguousClass";
        case ErrorKind::NotHyperbolic: return "NotHyperbolic";
        case ErrorKind::BadArc: return "BadArc";
        case ErrorKind::NumericFailure: return "NumericFailure";
        case ErrorKind::Budget: return "Budget";
        case ErrorKind::OutOfWindow: return "OutOfWindow";
        case ErrorKind::WindowTooShort: return "WindowTooShort";
        case ErrorKind::TrivialElement: return "TrivialElement";
        case ErrorKind::EvenPrime: return "EvenPrime";
        case ErrorKind::ZeroArgument: return "ZeroArgument";
        case ErrorKind::BadEmbedding: return "BadEmbedding";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::RadiusMismatch: return "RadiusMismatch";
        case ErrorKind::UnsupportedMeasure: return "UnsupportedMeasure";
        case ErrorKind::Usage: return "Usage";
        case ErrorKind::VersionMismatch: return "VersionMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace irslab
