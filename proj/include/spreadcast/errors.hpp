#pragma once

#include <stdexcept>
#include <string>

namespace spreadcast {

/// Base of every recoverable error raised by the library. The `kind()` tag is
/// what the CLI prints in its machine-readable error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SPREADCAST_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

// dists
SPREADCAST_ERROR(DomainError);
SPREADCAST_ERROR(EvalError);
SPREADCAST_ERROR(QuantileFailure);
// gamlss
SPREADCAST_ERROR(NonConvergence);
SPREADCAST_ERROR(SingularDesign);
SPREADCAST_ERROR(MissingCovariate);
// data
SPREADCAST_ERROR(CalendarError);
SPREADCAST_ERROR(InsufficientHistory);
SPREADCAST_ERROR(SchemaError);
// evalx / trade
SPREADCAST_ERROR(EmptyHorizon);
SPREADCAST_ERROR(NoCandidate);
SPREADCAST_ERROR(DegenerateVariance);
// pipeline
SPREADCAST_ERROR(MissingArchive);
SPREADCAST_ERROR(ConfigError);

#undef SPREADCAST_ERROR

}  // namespace spreadcast
