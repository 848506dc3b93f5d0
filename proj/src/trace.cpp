#include "dietcha/trace.h"

namespace dietcha {

nlohmann::json to_json(const PlanStep& step) {
    return {{"thought", step.thought}, {"action", step.action}, {"action_input", step.action_input}};
}

nlohmann::json to_json(const TraceRecord& record) {
    nlohmann::json j = {
        {"step_index", record.step_index},
        {"turn", record.turn},
        {"trace_id", record.trace_id},
        {"task", record.plan_step.action},
        {"plan_step", to_json(record.plan_step)},
        {"outcome", record.ok ? "success" : "error"},
        {"pipe_key", record.pipe_key ? nlohmann::json(*record.pipe_key) : nlohmann::json(nullptr)},
        {"summary", record.summary},
        {"duration_ms", record.duration_ms},
        {"finished_at", record.finished_at},
    };
    if (!record.ok) j["error"] = record.error;
    return j;
}

nlohmann::json to_json(const TurnTrace& trace) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : trace.records) records.push_back(to_json(r));
    return {
        {"trace_id", trace.trace_id},
        {"turn", trace.turn},
        {"records", std::move(records)},
        {"budget_exhausted", trace.budget_exhausted},
        {"degraded", trace.degraded},
        {"started_at", trace.started_at},
        {"finished_at", trace.finished_at},
    };
}

nlohmann::json to_json(const ChatTurn& turn) {
    return {{"role", turn.role}, {"text", turn.text}, {"timestamp", turn.timestamp}};
}

}  // namespace dietcha
