#include "ctlab/errors.hpp"

namespace ctlab {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::DuplicateEdge: return "DuplicateEdge";
        case ErrorCode::InvalidVertex: return "InvalidVertex";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::EmptyGraph: return "EmptyGraph";
        case ErrorCode::InvalidParameters: return "InvalidParameters";
        case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
        case ErrorCode::NotCritical: return "NotCritical";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::NotACutset: return "NotACutset";
        case ErrorCode::OverlappingCutsets: return "OverlappingCutsets";
        case ErrorCode::TooFewCenters: return "TooFewCenters";
        case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::DegenerateField: return "DegenerateField";
    }
    return "UnknownError";
}

} // namespace ctlab
