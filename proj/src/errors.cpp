#include "wild_euler/errors.hpp"

namespace we {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidField: return "InvalidField";
        case ErrorCode::NotSwirlFree: return "NotSwirlFree";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::UnknownWeakForm: return "UnknownWeakForm";
        case ErrorCode::DegenerateDensity: return "DegenerateDensity";
        case ErrorCode::NotInCone: return "NotInCone";
        case ErrorCode::DegenerateDirection: return "DegenerateDirection";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NegativeChi: return "NegativeChi";
        case ErrorCode::InvalidDomain: return "InvalidDomain";
        case ErrorCode::IntegrationDiverged: return "IntegrationDiverged";
        case ErrorCode::NoWindow: return "NoWindow";
        case ErrorCode::FanTooFast: return "FanTooFast";
        case ErrorCode::FanUnresolved: return "FanUnresolved";
        case ErrorCode::Saturated: return "Saturated";
        case ErrorCode::StepRejected: return "StepRejected";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace we
