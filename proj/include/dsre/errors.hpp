#pragma once

#include <stdexcept>
#include <string>

namespace dsre {

// Every recoverable failure mode gets its own type so callers (and the CLI
// exit-code mapping) can discriminate without string matching.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonIntegrable : Error {
    using Error::Error;
};
struct NoRootInRange : Error {
    using Error::Error;
};
struct StationarityViolated : Error {
    using Error::Error;
};
struct TiltNotNormalized : Error {
    using Error::Error;
};
struct ZeroVector : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct InsufficientExceedances : Error {
    using Error::Error;
};
struct WindowTooShort : Error {
    using Error::Error;
};
struct NonPositiveConstant : Error {
    using Error::Error;
};
struct DegenerateSample : Error {
    using Error::Error;
};
struct PassageTimeout : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct CaseOrderingViolated : Error {
    using Error::Error;
};

} // namespace dsre
