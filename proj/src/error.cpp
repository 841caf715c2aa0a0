#include "lna/error.hpp"

namespace lna {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::FrequencyMismatch: return "FrequencyMismatch";
    case ErrorKind::NonPassiveSource: return "NonPassiveSource";
    case ErrorKind::ZeroReverseTransmission: return "ZeroReverseTransmission";
    case ErrorKind::DegenerateNetwork: return "DegenerateNetwork";
    case ErrorKind::UnphysicalNoiseParameters: return "UnphysicalNoiseParameters";
    case ErrorKind::UnphysicalCorrelation: return "UnphysicalCorrelation";
    case ErrorKind::NonPassiveNetwork: return "NonPassiveNetwork";
    case ErrorKind::UnityGain: return "UnityGain";
    case ErrorKind::NoAmplifyingRegion: return "NoAmplifyingRegion";
    case ErrorKind::NegativeTemperature: return "NegativeTemperature";
    case ErrorKind::NegativeNF: return "NegativeNF";
    case ErrorKind::NonPositiveBias: return "NonPositiveBias";
    case ErrorKind::InvalidTopologyTag: return "InvalidTopologyTag";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace lna
