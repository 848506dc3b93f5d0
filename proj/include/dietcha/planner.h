#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dietcha/chat_backend.h"
#include "dietcha/data_pipe.h"
#include "dietcha/knowledge_source.h"
#include "dietcha/tasks.h"
#include "dietcha/trace.h"

namespace dietcha {

struct PlannerContext {
    const std::vector<ChatTurn>& history;  // ends with the current user turn
    const TaskRegistry& registry;
    const DataPipe& pipe;
    std::size_t turn = 0;
    const std::vector<TraceRecord>& steps_this_turn;
};

class Planner {
public:
    virtual ~Planner() = default;
    virtual PlanStep plan(const PlannerContext& ctx) = 0;
};

/// Deterministic planner:
///   1. a question about how the last answer was produced -> Final (explain)
///   2. food in the turn and no lookup yet -> meal_nutrition_lookup(text)
///   3. this turn's nutrition result without a risk report -> diet_risk_assessment
///   4. otherwise Final
class RulePlanner final : public Planner {
public:
    explicit RulePlanner(std::shared_ptr<const KnowledgeSource> source);
    PlanStep plan(const PlannerContext& ctx) override;

private:
    std::shared_ptr<const KnowledgeSource> source_;
};

/// True for "how did you compute that?"-style follow-ups.
bool is_explanation_request(std::string_view text);

/// Parses the planner reply grammar
///
///     Thought: <free text>
///     Action: <task name | Final>
///     Action Input: <JSON object>
///
/// The last "Action:" line wins, so candidate enumerations before the final
/// commitment are ignored. "$pipe:<key>" values must name existing entries.
/// Throws UnparseableAction with details.reason and details.raw.
PlanStep parse_plan_reply(std::string_view reply, const TaskRegistry& registry, const DataPipe& pipe);

/// Tree-of-Thought planner prompt: tasks, pipe contents, this turn's steps,
/// and the action grammar, followed by the conversation.
std::vector<ChatMessage> render_planner_prompt(const PlannerContext& ctx);

/// Planner backed by a chat model. An unparseable reply is re-prompted at most
/// twice before UnparseableAction is thrown. Backend failures propagate.
class LlmPlanner final : public Planner {
public:
    static constexpr int kMaxReprompts = 2;

    LlmPlanner(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config);
    PlanStep plan(const PlannerContext& ctx) override;

private:
    std::shared_ptr<ChatBackend> backend_;
    ChatBackendConfig config_;
};

}  // namespace dietcha
