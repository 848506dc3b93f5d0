#include "dietcha/error.h"

namespace dietcha {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidQuantity: return "InvalidQuantity";
        case ErrorCode::UnitMismatch: return "UnitMismatch";
        case ErrorCode::InvalidGuidelines: return "InvalidGuidelines";
        case ErrorCode::EmptyMeal: return "EmptyMeal";
        case ErrorCode::MalformedItem: return "MalformedItem";
        case ErrorCode::DuplicateAlias: return "DuplicateAlias";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::FoodNotFound: return "FoodNotFound";
        case ErrorCode::UnknownUnit: return "UnknownUnit";
        case ErrorCode::MealUnresolvable: return "MealUnresolvable";
        case ErrorCode::NetworkError: return "NetworkError";
        case ErrorCode::AuthError: return "AuthError";
        case ErrorCode::UnparseableResponse: return "UnparseableResponse";
        case ErrorCode::UnparseableAction: return "UnparseableAction";
        case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
        case ErrorCode::MissingKey: return "MissingKey";
        case ErrorCode::InvalidTaskInput: return "InvalidTaskInput";
        case ErrorCode::UnknownTask: return "UnknownTask";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::ScriptExhausted: return "ScriptExhausted";
        case ErrorCode::CorpusSchema: return "CorpusSchema";
        case ErrorCode::InvalidRequest: return "InvalidRequest";
        case ErrorCode::SessionNotFound: return "SessionNotFound";
        case ErrorCode::TraceNotFound: return "TraceNotFound";
        case ErrorCode::RouteNotFound: return "RouteNotFound";
        case ErrorCode::TurnInProgress: return "TurnInProgress";
    }
    return "Unknown";
}

nlohmann::json Error::to_json() const {
    return {{"code", std::string(to_string(code_))}, {"message", what()}, {"details", details_}};
}

}  // namespace dietcha
