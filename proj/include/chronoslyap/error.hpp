#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chronoslyap {

enum class ErrorCode {
    // validation
    NotInTimeScale,
    EmptyWindow,
    InvalidParameter,
    ReversedBounds,
    NonSymmetricInput,
    NonSymmetric,
    DimensionMismatch,
    GridMismatch,
    OracleTooLarge,
    ParseError,
    // numerical
    WindowExhausted,
    NotRegressive,
    SingularTransition,
    UnstableSpectrum,
    SingularKroneckerSystem,
    SpectralRadiusNotLessThanOne,
    NoDecayDetected,
    WindowTooShort,
    PositiveDefinitenessLost,
    SymmetryLost,
    SpotCheckFailed,
    EigenSolverFailure,
    ZeroRegressivityPoint,
    SeriesNotConverged,
    ReductionMismatch,
};

constexpr std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotInTimeScale: return "NotInTimeScale";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ReversedBounds: return "ReversedBounds";
        case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
        case ErrorCode::NonSymmetric: return "NonSymmetric";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::OracleTooLarge: return "OracleTooLarge";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::WindowExhausted: return "WindowExhausted";
        case ErrorCode::NotRegressive: return "NotRegressive";
        case ErrorCode::SingularTransition: return "SingularTransition";
        case ErrorCode::UnstableSpectrum: return "UnstableSpectrum";
        case ErrorCode::SingularKroneckerSystem: return "SingularKroneckerSystem";
        case ErrorCode::SpectralRadiusNotLessThanOne: return "SpectralRadiusNotLessThanOne";
        case ErrorCode::NoDecayDetected: return "NoDecayDetected";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::PositiveDefinitenessLost: return "PositiveDefinitenessLost";
        case ErrorCode::SymmetryLost: return "SymmetryLost";
        case ErrorCode::SpotCheckFailed: return "SpotCheckFailed";
        case ErrorCode::EigenSolverFailure: return "EigenSolverFailure";
        case ErrorCode::ZeroRegressivityPoint: return "ZeroRegressivityPoint";
        case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
        case ErrorCode::ReductionMismatch: return "ReductionMismatch";
    }
    return "Unknown";
}

/// True for errors caused by malformed or inconsistent input rather than by
/// the numerics of a well-posed problem.
constexpr bool is_validation_error(ErrorCode code) {
    return code <= ErrorCode::ParseError;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace chronoslyap
