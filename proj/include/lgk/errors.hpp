#pragma once

#include <stdexcept>
#include <string>

namespace lgk {

enum class ErrorKind {
    NonConvex,
    DegenerateChain,
    DiscontinuousData,
    NotMonotoneOnFlat,
    NoPreimage,
    StructuralContradiction,
    TangentLineConflict,
    NotOneSided,
    RepairFailed,
    NonNestedLevels,
    InfeasiblePolarity,
    NotAdmissible,
    NoConvergence,
    ComparisonViolation,
    NoMatchedPair,
    DiscontinuousAtAccumulation,
    DisconnectedMask,
    FlowNonConvergence,
    GridMismatch,
    NotStrictlyConvex,
    BadInput,
    IoError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonConvex: return "NonConvex";
        case ErrorKind::DegenerateChain: return "DegenerateChain";
        case ErrorKind::DiscontinuousData: return "DiscontinuousData";
        case ErrorKind::NotMonotoneOnFlat: return "NotMonotoneOnFlat";
        case ErrorKind::NoPreimage: return "NoPreimage";
        case ErrorKind::StructuralContradiction: return "StructuralContradiction";
        case ErrorKind::TangentLineConflict: return "TangentLineConflict";
        case ErrorKind::NotOneSided: return "NotOneSided";
        case ErrorKind::RepairFailed: return "RepairFailed";
        case ErrorKind::NonNestedLevels: return "NonNestedLevels";
        case ErrorKind::InfeasiblePolarity: return "InfeasiblePolarity";
        case ErrorKind::NotAdmissible: return "NotAdmissible";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::ComparisonViolation: return "ComparisonViolation";
        case ErrorKind::NoMatchedPair: return "NoMatchedPair";
        case ErrorKind::DiscontinuousAtAccumulation: return "DiscontinuousAtAccumulation";
        case ErrorKind::DisconnectedMask: return "DisconnectedMask";
        case ErrorKind::FlowNonConvergence: return "FlowNonConvergence";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotStrictlyConvex: return "NotStrictlyConvex";
        case ErrorKind::BadInput: return "BadInput";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the toolkit carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Process exit status for a failure kind: 2 bad input, 3 not admissible, 4 structural
/// contradiction, 5 convergence failure.
inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotAdmissible:
        case ErrorKind::NotMonotoneOnFlat:
        case ErrorKind::NoMatchedPair:
        case ErrorKind::DiscontinuousAtAccumulation:
            return 3;
        case ErrorKind::StructuralContradiction:
        case ErrorKind::TangentLineConflict:
        case ErrorKind::NoPreimage:
        case ErrorKind::NotOneSided:
        case ErrorKind::RepairFailed:
        case ErrorKind::NonNestedLevels:
        case ErrorKind::InfeasiblePolarity:
        case ErrorKind::ComparisonViolation:
            return 4;
        case ErrorKind::NoConvergence:
        case ErrorKind::FlowNonConvergence:
            return 5;
        default:
            return 2;
    }
}

}  // namespace lgk
