#include "dietcha/agent.h"

#include <chrono>

#include "dietcha/error.h"
#include "dietcha/format.h"

namespace dietcha {

std::string_view to_string(AgentMode mode) {
    return mode == AgentMode::Deterministic ? "deterministic" : "llm";
}

std::optional<AgentMode> agent_mode_from_string(std::string_view s) {
    if (s == "deterministic") return AgentMode::Deterministic;
    if (s == "llm") return AgentMode::Llm;
    return std::nullopt;
}

Session::Session(std::string id) : id_(std::move(id)), created_at_(utc_timestamp_now()) {}

std::vector<ChatTurn> Session::transcript() const {
    std::lock_guard lock(data_mutex_);
    return transcript_;
}

std::vector<TurnTrace> Session::traces() const {
    std::lock_guard lock(data_mutex_);
    return traces_;
}

std::optional<TurnTrace> Session::trace(std::string_view trace_id) const {
    std::lock_guard lock(data_mutex_);
    for (const auto& t : traces_) {
        if (t.trace_id == trace_id) return t;
    }
    return std::nullopt;
}

std::vector<TraceRecord> Session::records() const {
    std::lock_guard lock(data_mutex_);
    std::vector<TraceRecord> out;
    for (const auto& t : traces_) out.insert(out.end(), t.records.begin(), t.records.end());
    return out;
}

NutrientVector Session::day_totals() const {
    std::lock_guard lock(data_mutex_);
    return day_totals_;
}

DataPipe Session::pipe() const {
    std::lock_guard lock(data_mutex_);
    return pipe_;
}

bool Session::try_begin_turn() {
    bool expected = false;
    return busy_.compare_exchange_strong(expected, true);
}

void Session::end_turn() { busy_.store(false); }

TraceRecord execute_step(const PlanStep& step, const TaskRegistry& registry, DataPipe& pipe, std::size_t turn) {
    TraceRecord record;
    record.turn = turn;
    record.plan_step = step;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto task = registry.find(step.action);
        if (!task) throw Error(ErrorCode::UnknownTask, "no task named '" + step.action + "'", {{"task", step.action}});
        if (!step.action_input.is_object()) {
            throw Error(ErrorCode::InvalidTaskInput, "action input must be a JSON object");
        }
        TaskInputs inputs;
        for (const auto& [name, value] : step.action_input.items()) {
            auto key = value.is_string() ? DataPipe::parse_ref(value.get<std::string>()) : std::nullopt;
            if (!key) {
                inputs.literal[name] = value;
                continue;
            }
            auto entry = pipe.get(*key);
            if (!entry) {
                throw Error(ErrorCode::MissingKey, "data pipe has no entry '" + *key + "'",
                            {{"key", *key}, {"input", name}});
            }
            inputs.refs[name] = std::move(entry);
        }
        const auto& d = task->descriptor();
        auto payload = task->run(inputs, {pipe, turn});
        record.pipe_key = pipe.put(d.name, d.output_kind, std::move(payload), turn);
        record.summary = d.name + " stored " + d.output_kind + " as " + *record.pipe_key;
    } catch (const Error& e) {
        record.ok = false;
        record.error = e.to_json();
        record.summary = step.action + " failed: " + e.what();
    } catch (const std::exception& e) {
        // Malformed payloads from a task surface as JSON exceptions; keep the loop alive.
        record.ok = false;
        record.error = {{"code", "InvalidTaskInput"}, {"message", e.what()}, {"details", nlohmann::json::object()}};
        record.summary = step.action + " failed: " + e.what();
    }
    record.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    record.finished_at = utc_timestamp_now();
    return record;
}

Agent::Agent(AgentMode mode, std::shared_ptr<Planner> planner, std::shared_ptr<Responder> responder,
             std::shared_ptr<const TaskRegistry> registry, int max_steps)
    : mode_(mode),
      planner_(std::move(planner)),
      responder_(std::move(responder)),
      registry_(std::move(registry)),
      max_steps_(max_steps) {
    if (max_steps_ < 1) throw Error(ErrorCode::InvalidTaskInput, "max_steps must be at least 1");
}

TurnResult Agent::run_turn(Session& session, std::string_view text) const {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw Error(ErrorCode::InvalidTaskInput, "message text is empty", {{"input", "text"}});
    }
    std::lock_guard turn_lock(session.turn_mutex_);

    std::vector<ChatTurn> history;
    DataPipe pipe;
    std::optional<TurnTrace> previous;
    std::size_t step_index = 0;
    std::size_t turn = 0;
    {
        std::lock_guard lock(session.data_mutex_);
        history = session.transcript_;
        pipe = session.pipe_;
        if (!session.traces_.empty()) previous = session.traces_.back();
        step_index = session.next_step_index_;
        turn = session.traces_.size();
    }
    history.push_back({"user", std::string(text), utc_timestamp_now()});

    TurnTrace trace;
    trace.turn = turn;
    trace.trace_id = session.id() + "-t" + std::to_string(turn + 1);
    trace.started_at = utc_timestamp_now();

    bool finished = false;
    bool explain = false;
    std::vector<std::shared_ptr<const DataPipeEntry>> produced;
    while (trace.records.size() < static_cast<std::size_t>(max_steps_)) {
        PlannerContext ctx{history, *registry_, pipe, turn, trace.records};
        const auto start = std::chrono::steady_clock::now();
        TraceRecord record;
        try {
            const auto step = planner_->plan(ctx);
            if (step.is_final()) {
                record.plan_step = step;
                record.summary = "final answer";
                explain = step.action_input.is_object() && step.action_input.value("explain", false);
                finished = true;
            } else {
                record = execute_step(step, *registry_, pipe, turn);
                if (record.pipe_key) produced.push_back(pipe.get(*record.pipe_key));
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnparseableAction) throw;
            record.plan_step = {"planner reply could not be parsed", kFinalAction, nlohmann::json::object()};
            record.ok = false;
            record.error = e.to_json();
            record.summary = "planner gave up: " + std::string(e.what());
            finished = true;
        }
        record.turn = turn;
        record.trace_id = trace.trace_id;
        record.step_index = step_index++;
        if (record.plan_step.is_final()) {
            record.duration_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            record.finished_at = utc_timestamp_now();
        }
        trace.records.push_back(std::move(record));
        if (finished) break;
    }
    trace.budget_exhausted = !finished;

    ResponseContext rctx{std::string(text), produced, trace.records, previous, explain, trace.budget_exhausted};
    TurnResult result;
    result.response = responder_->respond(rctx);
    trace.degraded = result.response.degraded;
    trace.finished_at = utc_timestamp_now();
    result.timestamp = utc_timestamp_now();
    result.trace = trace;

    std::lock_guard lock(session.data_mutex_);
    session.transcript_.push_back(history.back());
    session.transcript_.push_back({"agent", result.response.text, result.timestamp});
    session.traces_.push_back(std::move(trace));
    session.pipe_ = std::move(pipe);
    session.next_step_index_ = step_index;
    if (auto meal = session.pipe_.latest(kMealNutritionKind)) {
        session.day_totals_ = nutrient_vector_from_json(meal->payload.at("day_totals"));
    }
    return result;
}

std::shared_ptr<TaskRegistry> make_default_registry(std::shared_ptr<const KnowledgeSource> source,
                                                    std::shared_ptr<const GuidelineSet> guidelines) {
    auto registry = std::make_shared<TaskRegistry>();
    registry->add(std::make_shared<MealNutritionLookupTask>(std::move(source)));
    registry->add(std::make_shared<DietRiskAssessmentTask>(std::move(guidelines)));
    return registry;
}

std::shared_ptr<Agent> make_deterministic_agent(std::shared_ptr<const KnowledgeSource> source,
                                                std::shared_ptr<const GuidelineSet> guidelines, int max_steps) {
    auto registry = make_default_registry(source, std::move(guidelines));
    return std::make_shared<Agent>(AgentMode::Deterministic, std::make_shared<RulePlanner>(std::move(source)),
                                   std::make_shared<DeterministicResponder>(), std::move(registry), max_steps);
}

std::shared_ptr<Agent> make_llm_agent(std::shared_ptr<const KnowledgeSource> source,
                                      std::shared_ptr<const GuidelineSet> guidelines,
                                      std::shared_ptr<ChatBackend> backend, const ChatBackendConfig& config) {
    config.validate();
    auto registry = make_default_registry(std::move(source), std::move(guidelines));
    return std::make_shared<Agent>(AgentMode::Llm, std::make_shared<LlmPlanner>(backend, config),
                                   std::make_shared<LlmResponder>(backend, config), std::move(registry),
                                   config.max_steps);
}

}  // namespace dietcha
