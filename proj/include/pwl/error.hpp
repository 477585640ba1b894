#pragma once

#include <stdexcept>
#include <string>

namespace pwl {

enum class ErrorCode {
    DegenerateZone,
    HypothesisViolation,
    OutsideZone,
    OutOfAnnulus,
    DomainError,
    QuadratureNonConvergence,
    FitResidualTooLarge,
    ClassMismatch,
    RankDeficient,
    TargetNotSupported,
    LadderFailed,
    WindowTooLarge,
    TangencyEncountered,
    Escape,
    BracketLost,
    ParseError,
    UnknownSubcommand
};

inline const char* to_string(ErrorCode c)
{
    switch (c) {
    case ErrorCode::DegenerateZone: return "DegenerateZone";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::OutsideZone: return "OutsideZone";
    case ErrorCode::OutOfAnnulus: return "OutOfAnnulus";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::FitResidualTooLarge: return "FitResidualTooLarge";
    case ErrorCode::ClassMismatch: return "ClassMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TargetNotSupported: return "TargetNotSupported";
    case ErrorCode::LadderFailed: return "LadderFailed";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::TangencyEncountered: return "TangencyEncountered";
    case ErrorCode::Escape: return "Escape";
    case ErrorCode::BracketLost: return "BracketLost";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownSubcommand: return "UnknownSubcommand";
    }
    return "Unknown";
}

// Numerical failures map to CLI exit status 3, everything else to 2.
inline bool is_numerical(ErrorCode c)
{
    switch (c) {
    case ErrorCode::QuadratureNonConvergence:
    case ErrorCode::FitResidualTooLarge:
    case ErrorCode::RankDeficient:
    case ErrorCode::LadderFailed:
    case ErrorCode::TangencyEncountered:
    case ErrorCode::Escape:
    case ErrorCode::BracketLost:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pwl
