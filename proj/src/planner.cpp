#include "dietcha/planner.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "dietcha/error.h"
#include "dietcha/format.h"

namespace dietcha {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

const ChatTurn* latest_user_turn(const std::vector<ChatTurn>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role == "user") return &*it;
    }
    return nullptr;
}

[[noreturn]] void unparseable(const std::string& reason, std::string_view raw) {
    throw Error(ErrorCode::UnparseableAction, "planner reply could not be parsed: " + reason,
                {{"reason", reason}, {"raw", std::string(raw)}});
}

// Balanced {...} starting at the first '{', honouring JSON strings.
std::optional<std::string> extract_json_object(std::string_view text) {
    const auto start = text.find('{');
    if (start == std::string_view::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}' && --depth == 0) {
            return std::string(text.substr(start, i - start + 1));
        }
    }
    return std::nullopt;
}

std::string summarize_entry(const DataPipeEntry& e) {
    std::ostringstream out;
    out << e.key << " (" << e.kind << " from " << e.producer << ", turn " << e.turn << "): ";
    if (e.kind == kMealNutritionKind) {
        out << e.payload.value("items", nlohmann::json::array()).size() << " foods resolved, "
            << e.payload.value("warnings", nlohmann::json::array()).size() << " warnings";
    } else if (e.kind == kRiskReportKind) {
        out << "labels " << e.payload.value("labels", nlohmann::json::object()).dump();
    } else {
        out << e.payload.dump().substr(0, 160);
    }
    return out.str();
}

}  // namespace

bool is_explanation_request(std::string_view text) {
    static constexpr std::array<std::string_view, 16> kCues = {
        "how did you",  "how was that", "how were",   "how do you know", "explain",      "why is",
        "why are",      "show me the steps", "what steps", "which steps", "where did",   "what data",
        "what source",  "trace",        "how come",   "how was it",
    };
    const auto lower = lowercase(text);
    return std::any_of(kCues.begin(), kCues.end(),
                       [&](std::string_view cue) { return lower.find(cue) != std::string::npos; });
}

RulePlanner::RulePlanner(std::shared_ptr<const KnowledgeSource> source) : source_(std::move(source)) {}

PlanStep RulePlanner::plan(const PlannerContext& ctx) {
    if (ctx.registry.empty()) throw Error(ErrorCode::UnknownTask, "planner needs at least one registered task");
    const ChatTurn* user = latest_user_turn(ctx.history);
    const std::string text = user ? user->text : std::string();

    auto attempted = [&](std::string_view task) {
        return std::any_of(ctx.steps_this_turn.begin(), ctx.steps_this_turn.end(),
                           [&](const TraceRecord& r) { return r.plan_step.action == task; });
    };

    if (ctx.steps_this_turn.empty() && is_explanation_request(text)) {
        return {"The user asks how the previous answer was produced; summarize the previous trace.", kFinalAction,
                {{"explain", true}}};
    }
    if (!attempted(kMealLookupTask) && ctx.registry.find(kMealLookupTask) && source_->mentions_food(text)) {
        return {"The message describes food that has not been resolved yet; look up its nutrients.",
                std::string(kMealLookupTask), {{"meal", text}}};
    }
    if (!attempted(kRiskAssessmentTask) && ctx.registry.find(kRiskAssessmentTask)) {
        if (auto nutrition = ctx.pipe.latest(kMealNutritionKind, ctx.turn)) {
            return {"Nutrition totals are available without a risk report; compare them with the guidelines.",
                    std::string(kRiskAssessmentTask), {{"nutrition", DataPipe::make_ref(nutrition->key)}}};
        }
    }
    return {"Everything needed for the answer is available.", kFinalAction, nlohmann::json::object()};
}

PlanStep parse_plan_reply(std::string_view reply, const TaskRegistry& registry, const DataPipe& pipe) {
    std::vector<std::string> lines;
    {
        std::string line;
        std::istringstream in{std::string(reply)};
        while (std::getline(in, line)) lines.push_back(line);
    }
    auto label_of = [](const std::string& line, std::string_view label) -> std::optional<std::string> {
        const auto t = trim(line);
        if (t.size() < label.size() || lowercase(t.substr(0, label.size())) != lowercase(label)) return std::nullopt;
        return trim(std::string_view(t).substr(label.size()));
    };

    std::optional<std::size_t> action_line;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (label_of(lines[i], "Action:")) action_line = i;
    }
    if (!action_line) unparseable("no 'Action:' line", reply);

    PlanStep step;
    step.action = *label_of(lines[*action_line], "Action:");
    if (step.action.empty()) unparseable("empty action", reply);
    if (lowercase(step.action) == "final") step.action = kFinalAction;
    if (!step.is_final() && !registry.find(step.action)) unparseable("unknown action '" + step.action + "'", reply);

    for (std::size_t i = *action_line; i-- > 0;) {
        if (auto t = label_of(lines[i], "Thought:")) {
            step.thought = *t;
            break;
        }
    }

    std::optional<std::size_t> input_line;
    for (std::size_t i = *action_line + 1; i < lines.size(); ++i) {
        if (label_of(lines[i], "Action Input:")) {
            input_line = i;
            break;
        }
    }
    if (!input_line) {
        if (!step.is_final()) unparseable("no 'Action Input:' line", reply);
        return step;
    }
    std::string rest = *label_of(lines[*input_line], "Action Input:");
    for (std::size_t i = *input_line + 1; i < lines.size(); ++i) rest += "\n" + lines[i];
    auto object_text = extract_json_object(rest);
    if (!object_text) unparseable("'Action Input:' is not a JSON object", reply);
    try {
        step.action_input = nlohmann::json::parse(*object_text);
    } catch (const nlohmann::json::parse_error&) {
        unparseable("'Action Input:' is not valid JSON", reply);
    }
    for (const auto& [name, value] : step.action_input.items()) {
        if (!value.is_string()) continue;
        if (auto key = DataPipe::parse_ref(value.get<std::string>()); key && !pipe.contains(*key)) {
            unparseable("input '" + name + "' refers to missing pipe key '" + *key + "'", reply);
        }
    }
    return step;
}

std::vector<ChatMessage> render_planner_prompt(const PlannerContext& ctx) {
    std::ostringstream sys;
    sys << "You are the task planner of a conversational health agent that helps people with diabetes assess "
           "their daily food intake against dietary guidelines. Decide the single next action.\n\n";
    sys << "Available tasks:\n";
    for (const auto& d : ctx.registry.descriptors()) {
        sys << "- " << d.name << ": " << d.description << " Inputs:";
        for (const auto& p : d.inputs) sys << " " << p.name << " (" << p.description << ")";
        sys << ". Output: " << d.output_kind << ".\n";
    }
    sys << "- " << kFinalAction << ": stop planning and let the response generator answer the user.\n\n";

    sys << "Data pipe entries (refer to them as " << DataPipe::kRefPrefix << "<key>):\n";
    if (ctx.pipe.entries().empty()) sys << "- none\n";
    for (const auto& e : ctx.pipe.entries()) sys << "- " << summarize_entry(*e) << "\n";

    sys << "\nSteps already executed for this message:\n";
    if (ctx.steps_this_turn.empty()) sys << "- none\n";
    for (const auto& r : ctx.steps_this_turn) {
        sys << "- " << r.plan_step.action << ": "
            << (r.ok ? "stored " + r.pipe_key.value_or("") : "failed (" + r.error.value("code", "") + ": " +
                                                                 r.error.value("message", "") + ")")
            << "\n";
    }

    sys << "\nThink as a tree of thoughts: first list three candidate next actions, each with a one-line "
           "evaluation of how well it serves the user's latest message. Then commit to the best candidate. "
           "Do not repeat a task that already succeeded for this message. If a task failed, finish unless a "
           "different input could succeed.\n"
           "End your reply with exactly these three lines:\n"
           "Thought: <why the chosen action is best>\n"
           "Action: <one task name or "
        << kFinalAction
        << ">\n"
           "Action Input: <JSON object of task inputs; {} for "
        << kFinalAction << ">\n";

    std::vector<ChatMessage> messages{{"system", sys.str()}};
    for (const auto& t : ctx.history) messages.push_back({t.role == "agent" ? "assistant" : "user", t.text});
    return messages;
}

LlmPlanner::LlmPlanner(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {}

PlanStep LlmPlanner::plan(const PlannerContext& ctx) {
    if (ctx.registry.empty()) throw Error(ErrorCode::UnknownTask, "planner needs at least one registered task");
    ChatRequest request{config_.model, render_planner_prompt(ctx), config_.temperature};
    for (int attempt = 0;; ++attempt) {
        const auto reply = backend_->complete(request);
        try {
            return parse_plan_reply(reply, ctx.registry, ctx.pipe);
        } catch (const Error& e) {
            if (attempt >= kMaxReprompts) throw;
            request.messages.push_back({"assistant", reply});
            request.messages.push_back(
                {"user", "Your previous reply could not be used: " + e.details().value("reason", std::string(e.what())) +
                             ". Reply again and end with the three lines 'Thought:', 'Action:' and 'Action Input:'."});
        }
    }
}

}  // namespace dietcha
