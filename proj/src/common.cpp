#include "pfence/common.hpp"

namespace pfence {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::GenerationFailed: return "GenerationFailed";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::ProjectionFailed: return "ProjectionFailed";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::ClosureViolation: return "ClosureViolation";
        case ErrorCode::NoIntersection: return "NoIntersection";
        case ErrorCode::NotAZeroPoint: return "NotAZeroPoint";
        case ErrorCode::InvalidFence: return "InvalidFence";
        case ErrorCode::SolverFailed: return "SolverFailed";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::OracleViolation: return "OracleViolation";
        case ErrorCode::NotLogConcave: return "NotLogConcave";
        case ErrorCode::NonpositiveMargin: return "NonpositiveMargin";
        case ErrorCode::NoBalancedCut: return "NoBalancedCut";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace pfence
