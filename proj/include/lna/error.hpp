#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lna {

enum class ErrorKind {
    SingularMatrix,
    FrequencyMismatch,
    NonPassiveSource,
    ZeroReverseTransmission,
    DegenerateNetwork,
    UnphysicalNoiseParameters,
    UnphysicalCorrelation,
    NonPassiveNetwork,
    UnityGain,
    NoAmplifyingRegion,
    NegativeTemperature,
    NegativeNF,
    NonPositiveBias,
    InvalidTopologyTag,
    Infeasible,
    GridTooLarge,
    InvalidArgument,
    Parse,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace lna
