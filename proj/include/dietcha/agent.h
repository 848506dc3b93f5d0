#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dietcha/chat_backend.h"
#include "dietcha/data_pipe.h"
#include "dietcha/guidelines.h"
#include "dietcha/knowledge_source.h"
#include "dietcha/nutrients.h"
#include "dietcha/planner.h"
#include "dietcha/responder.h"
#include "dietcha/tasks.h"
#include "dietcha/trace.h"

namespace dietcha {

enum class AgentMode { Deterministic, Llm };

std::string_view to_string(AgentMode mode);
std::optional<AgentMode> agent_mode_from_string(std::string_view s);

/// One conversation. Transcript and traces are append-only; the data pipe is
/// confined to the session. Reads are safe while a turn is running.
class Session {
public:
    explicit Session(std::string id);

    const std::string& id() const { return id_; }
    const std::string& created_at() const { return created_at_; }

    std::vector<ChatTurn> transcript() const;
    std::vector<TurnTrace> traces() const;
    std::optional<TurnTrace> trace(std::string_view trace_id) const;
    /// Every record of every turn, in step order.
    std::vector<TraceRecord> records() const;
    NutrientVector day_totals() const;
    DataPipe pipe() const;

    /// Non-blocking claim of the turn slot (the gateway answers 409 when it
    /// fails). Pair with end_turn().
    bool try_begin_turn();
    void end_turn();

private:
    friend class Agent;

    std::string id_;
    std::string created_at_;
    std::mutex turn_mutex_;  // serializes run_turn
    std::atomic<bool> busy_{false};

    mutable std::mutex data_mutex_;
    std::vector<ChatTurn> transcript_;
    std::vector<TurnTrace> traces_;
    DataPipe pipe_;
    NutrientVector day_totals_;
    std::size_t next_step_index_ = 0;
};

struct TurnResult {
    Response response;
    TurnTrace trace;
    std::string timestamp;
};

/// Resolves "$pipe:" references, runs the task, and stores its output under a
/// fresh key. Task errors are captured into the record, never thrown.
TraceRecord execute_step(const PlanStep& step, const TaskRegistry& registry, DataPipe& pipe, std::size_t turn);

class Agent {
public:
    Agent(AgentMode mode, std::shared_ptr<Planner> planner, std::shared_ptr<Responder> responder,
          std::shared_ptr<const TaskRegistry> registry, int max_steps = 5);

    /// Plan/execute until Final or max_steps, then respond. The whole turn
    /// is committed to the session only when it completes; a planner backend
    /// failure (BackendUnavailable) propagates and leaves the session as it was.
    TurnResult run_turn(Session& session, std::string_view text) const;

    AgentMode mode() const { return mode_; }
    int max_steps() const { return max_steps_; }
    const TaskRegistry& registry() const { return *registry_; }

private:
    AgentMode mode_;
    std::shared_ptr<Planner> planner_;
    std::shared_ptr<Responder> responder_;
    std::shared_ptr<const TaskRegistry> registry_;
    int max_steps_;
};

std::shared_ptr<TaskRegistry> make_default_registry(std::shared_ptr<const KnowledgeSource> source,
                                                    std::shared_ptr<const GuidelineSet> guidelines);

/// RulePlanner + DeterministicResponder.
std::shared_ptr<Agent> make_deterministic_agent(std::shared_ptr<const KnowledgeSource> source,
                                                std::shared_ptr<const GuidelineSet> guidelines, int max_steps = 5);

/// LlmPlanner + LlmResponder over one chat backend.
std::shared_ptr<Agent> make_llm_agent(std::shared_ptr<const KnowledgeSource> source,
                                      std::shared_ptr<const GuidelineSet> guidelines,
                                      std::shared_ptr<ChatBackend> backend, const ChatBackendConfig& config);

}  // namespace dietcha
