#pragma once

#include <stdexcept>
#include <string>

namespace faultrank {

/// Base class for all library errors. `kind()` is a stable machine-readable
/// identifier used by the CLI error reporting.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FAULTRANK_DEFINE_ERROR(Name)                              \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& message)                 \
            : Error(#Name, message) {}                            \
    }

FAULTRANK_DEFINE_ERROR(IngestError);
FAULTRANK_DEFINE_ERROR(ParamError);
FAULTRANK_DEFINE_ERROR(ScalingError);
FAULTRANK_DEFINE_ERROR(EmptySetError);
FAULTRANK_DEFINE_ERROR(EstimateUnreliable);
FAULTRANK_DEFINE_ERROR(NumericalError);
FAULTRANK_DEFINE_ERROR(SimulationError);
FAULTRANK_DEFINE_ERROR(IOError);
FAULTRANK_DEFINE_ERROR(ConfigError);

#undef FAULTRANK_DEFINE_ERROR

}  // namespace faultrank
