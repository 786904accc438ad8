#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irslab {

enum class ErrorKind {
    InvalidArgument,
    AmbiguousClass,
    NotHyperbolic,
    BadArc,
    NumericFailure,
    Budget,
    OutOfWindow,
    WindowTooShort,
    TrivialElement,
    EvenPrime,
    ZeroArgument,
    BadEmbedding,
    LengthMismatch,
    RadiusMismatch,
    UnsupportedMeasure,
    Usage,
    VersionMismatch,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace irslab
