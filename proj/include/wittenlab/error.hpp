#pragma once

#include <stdexcept>
#include <string>

namespace wittenlab {

enum class ErrorKind {
    InvalidInput,
    CutoffTooSmall,
    DegreeOutOfRange,
    NonSymmetric,
    NonMorse,
    MissedCriticalPoints,
    UnsupportedFlow,
    UnresolvableMatching,
    GapNotFound,
    ZeroCountMismatch,
    InvalidMorseData,
    QuadratureNonConvergence,
    NullityMismatch,
    SingularMap,
    RankMismatch,
    MismatchedComplexes,
    EvaluationUnavailable,
    Numerical,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::CutoffTooSmall: return "cutoff-too-small";
        case ErrorKind::DegreeOutOfRange: return "degree-out-of-range";
        case ErrorKind::NonSymmetric: return "non-symmetric";
        case ErrorKind::NonMorse: return "non-morse";
        case ErrorKind::MissedCriticalPoints: return "missed-critical-points";
        case ErrorKind::UnsupportedFlow: return "unsupported-flow";
        case ErrorKind::UnresolvableMatching: return "unresolvable-matching";
        case ErrorKind::GapNotFound: return "gap-not-found";
        case ErrorKind::ZeroCountMismatch: return "zero-count-mismatch";
        case ErrorKind::InvalidMorseData: return "invalid-morse-data";
        case ErrorKind::QuadratureNonConvergence: return "quadrature-non-convergence";
        case ErrorKind::NullityMismatch: return "nullity-mismatch";
        case ErrorKind::SingularMap: return "singular-map";
        case ErrorKind::RankMismatch: return "rank-mismatch";
        case ErrorKind::MismatchedComplexes: return "mismatched-complexes";
        case ErrorKind::EvaluationUnavailable: return "evaluation-unavailable";
        case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace wittenlab
