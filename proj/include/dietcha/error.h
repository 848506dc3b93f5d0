#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace dietcha {

enum class ErrorCode {
    InvalidQuantity,
    UnitMismatch,
    InvalidGuidelines,
    EmptyMeal,
    MalformedItem,
    DuplicateAlias,
    SchemaViolation,
    FoodNotFound,
    UnknownUnit,
    MealUnresolvable,
    NetworkError,
    AuthError,
    UnparseableResponse,
    UnparseableAction,
    StepBudgetExceeded,
    MissingKey,
    InvalidTaskInput,
    UnknownTask,
    BackendUnavailable,
    ScriptExhausted,
    CorpusSchema,
    InvalidRequest,
    SessionNotFound,
    TraceNotFound,
    RouteNotFound,
    TurnInProgress,
};

std::string_view to_string(ErrorCode code);

// Every failure the library raises carries a stable code plus optional
// structured details; the gateway maps these onto its error envelope.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

    nlohmann::json to_json() const;

private:
    ErrorCode code_;
    nlohmann::json details_;
};

}  // namespace dietcha
