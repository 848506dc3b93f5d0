#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dietcha {

inline constexpr const char* kFinalAction = "Final";

/// One planner decision.
struct PlanStep {
    std::string thought;
    std::string action;  // a registered task name or kFinalAction
    nlohmann::json action_input = nlohmann::json::object();

    bool is_final() const { return action == kFinalAction; }
    friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// The executed outcome of one plan step: the unit of explainability.
struct TraceRecord {
    std::size_t step_index = 0;  // strictly increasing within a session
    std::size_t turn = 0;
    std::string trace_id;
    PlanStep plan_step;
    bool ok = true;
    std::optional<std::string> pipe_key;
    nlohmann::json error;  // {code, message, details} when !ok
    std::string summary;
    double duration_ms = 0.0;
    std::string finished_at;
};

struct TurnTrace {
    std::string trace_id;
    std::size_t turn = 0;
    std::vector<TraceRecord> records;
    bool budget_exhausted = false;
    bool degraded = false;  // responder fell back to the template
    std::string started_at;
    std::string finished_at;
};

struct ChatTurn {
    std::string role;  // "user" | "agent"
    std::string text;
    std::string timestamp;
};

nlohmann::json to_json(const PlanStep& step);
nlohmann::json to_json(const TraceRecord& record);
nlohmann::json to_json(const TurnTrace& trace);
nlohmann::json to_json(const ChatTurn& turn);

}  // namespace dietcha
