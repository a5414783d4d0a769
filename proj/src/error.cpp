#include "mkp/error.hpp"

namespace mkp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotOddPrime: return "NotOddPrime";
        case ErrorCode::BasisOutOfRange: return "BasisOutOfRange";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ConstructionInconsistent: return "ConstructionInconsistent";
        case ErrorCode::PhaseCountMismatch: return "PhaseCountMismatch";
        case ErrorCode::DegenerateOutput: return "DegenerateOutput";
        case ErrorCode::EmptyPattern: return "EmptyPattern";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

}  // namespace mkp
