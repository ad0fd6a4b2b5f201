#pragma once

#include <stdexcept>
#include <string>

namespace we {

enum class ErrorCode {
    InvalidField,
    NotSwirlFree,
    GridTooCoarse,
    UnknownWeakForm,
    DegenerateDensity,
    NotInCone,
    DegenerateDirection,
    GridMismatch,
    NegativeChi,
    InvalidDomain,
    IntegrationDiverged,
    NoWindow,
    FanTooFast,
    FanUnresolved,
    Saturated,
    StepRejected,
    IoError,
    ConfigInvalid,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace we
