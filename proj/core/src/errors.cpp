#include "commfact/errors.hpp"

namespace commfact {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NormalityViolation: return "NormalityViolation";
        case ErrorKind::NilpotencyViolation: return "NilpotencyViolation";
        case ErrorKind::TraceNotZero: return "TraceNotZero";
        case ErrorKind::SumNotZero: return "SumNotZero";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::RankDegeneracy: return "RankDegeneracy";
        case ErrorKind::ShapeError: return "ShapeError";
        case ErrorKind::CoefficientMismatch: return "CoefficientMismatch";
        case ErrorKind::EigenvalueDegenerate: return "EigenvalueDegenerate";
        case ErrorKind::NoAdmissibleEigenvalue: return "NoAdmissibleEigenvalue";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace commfact
