#include "dietcha/responder.h"

#include <sstream>

#include "dietcha/error.h"
#include "dietcha/tasks.h"

namespace dietcha {

namespace {

std::shared_ptr<const DataPipeEntry> latest_of(const ResponseContext& ctx, std::string_view kind) {
    for (auto it = ctx.payloads.rbegin(); it != ctx.payloads.rend(); ++it) {
        if ((*it)->kind == kind) return *it;
    }
    return nullptr;
}

std::string label_text(const std::string& wire) {
    if (wire == "NotRisky") return "Not Risky";
    return wire;
}

std::string describe_item(const nlohmann::json& item) {
    std::string out = item.at("display").at("quantity").get<std::string>() + " ";
    const auto unit = item.at("unit").get<std::string>();
    if (unit != "count") out += unit + " ";
    out += item.at("food_name").get<std::string>();
    out += " (" + item.at("display").at("mass_g").get<std::string>() + " g)";
    return out;
}

void write_warnings(std::ostream& out, const nlohmann::json& warnings) {
    if (warnings.empty()) return;
    out << "\nI could not use every food you mentioned, so the totals leave these out:\n";
    for (const auto& w : warnings) out << "- " << w.value("message", "") << "\n";
}

void write_report(std::ostream& out, const DataPipeEntry& report, const DataPipeEntry* meal) {
    const auto& display = report.payload.at("display");
    if (meal) {
        const auto& items = meal->payload.at("items");
        if (!items.empty()) {
            out << "I found these foods:\n";
            for (const auto& item : items) out << "- " << describe_item(item) << "\n";
            out << "\n";
        }
    }
    out << "Your intake so far today comes to " << display.at("energy_kcal").get<std::string>()
        << " kcal. Compared with the diabetes dietary guidelines:\n";
    for (Nutrient n : kAllNutrients) {
        const auto& d = display.at("nutrients").at(std::string(to_string(n)));
        out << "- " << d.at("name").get<std::string>() << ": " << d.at("amount").get<std::string>() << " "
            << d.at("unit").get<std::string>();
        if (d.contains("percent")) out << " (" << d.at("percent").get<std::string>() << "% of energy)";
        out << ", " << label_text(d.at("label").get<std::string>()) << ". Guideline: "
            << d.at("guideline").get<std::string>() << ".\n";
    }
    write_warnings(out, report.payload.value("warnings", nlohmann::json::array()));
}

void write_explanation(std::ostream& out, const ResponseContext& ctx) {
    if (!ctx.previous_trace || ctx.previous_trace->records.empty()) {
        out << "There is no earlier answer to explain yet. Tell me what you ate and I will walk you through how I "
               "assess it.";
        return;
    }
    out << "Here is how I produced my previous answer:\n";
    for (const auto& r : ctx.previous_trace->records) {
        const auto& action = r.plan_step.action;
        out << "- ";
        if (action == kMealLookupTask) {
            out << "I looked up the foods in your message in the food composition database";
        } else if (action == kRiskAssessmentTask) {
            out << "I compared the day's nutrient totals with the diabetes dietary guidelines";
        } else if (r.plan_step.is_final()) {
            out << "I wrote the answer from the stored results";
        } else {
            out << "I ran the task " << action;
        }
        out << " (" << action << ")";
        if (!r.ok) out << ", which failed: " << r.error.value("message", "unknown error");
        out << ".\n";
    }
    if (ctx.previous_trace->budget_exhausted) out << "I stopped early because the step limit was reached.\n";
    out << "The full step list, with inputs and timings, is available from the trace view.";
}

std::string deterministic_text(const ResponseContext& ctx) {
    std::ostringstream out;
    if (ctx.explain) {
        write_explanation(out, ctx);
        return out.str();
    }
    const auto report = latest_of(ctx, kRiskReportKind);
    const auto meal = latest_of(ctx, kMealNutritionKind);
    if (report) {
        write_report(out, *report, meal.get());
    } else if (meal) {
        out << "I found the foods you described but could not compare them with the guidelines this time.\n";
        write_warnings(out, meal->payload.value("warnings", nlohmann::json::array()));
    } else {
        bool failed = false;
        for (const auto& r : ctx.steps) {
            if (r.ok || r.plan_step.is_final()) continue;
            if (!failed) out << "I could not assess that meal:\n";
            failed = true;
            out << "- " << r.error.value("message", "unknown error") << "\n";
            for (const auto& f : r.error.value("details", nlohmann::json::object()).value("failures",
                                                                                          nlohmann::json::array())) {
                out << "  - " << f.value("message", "") << "\n";
            }
        }
        if (failed) {
            out << "Could you describe it with foods and amounts, for example \"two slices of whole wheat toast and a "
                   "boiled egg\"?";
        } else {
            out << "Hello! I can check your daily meals against the dietary guidelines for diabetes. Tell me what "
                   "you ate, for example \"a cup of rice, two eggs and a glass of milk\".";
        }
    }
    if (ctx.budget_exhausted) out << "\nNote: I stopped after reaching the step limit, so this answer may be partial.";
    return out.str();
}

}  // namespace

void attach_results(const ResponseContext& ctx, Response& response) {
    if (ctx.explain) return;
    if (auto report = latest_of(ctx, kRiskReportKind)) {
        response.risk_report = risk_report_from_json(report->payload);
        response.warnings = report->payload.value("warnings", nlohmann::json::array());
    } else if (auto meal = latest_of(ctx, kMealNutritionKind)) {
        response.warnings = meal->payload.value("warnings", nlohmann::json::array());
    }
}

Response DeterministicResponder::respond(const ResponseContext& ctx) {
    Response response;
    response.text = deterministic_text(ctx);
    attach_results(ctx, response);
    return response;
}

std::vector<ChatMessage> render_responder_prompt(const ResponseContext& ctx) {
    std::ostringstream sys;
    sys << "You are a conversational health agent helping a person with diabetes understand their daily food "
           "intake. Answer the user's latest message using only the data provided below. Quote nutrient numbers "
           "exactly as they appear in the data; never compute, round or invent numbers. Mention every nutrient "
           "label in the risk report and every warning about foods that could not be found.\n";
    std::ostringstream data;
    if (ctx.explain) {
        data << "The user asks how the previous answer was produced. Previous trace:\n"
             << (ctx.previous_trace ? to_json(*ctx.previous_trace).dump() : std::string("none")) << "\n";
    }
    for (const auto& e : ctx.payloads) data << e->kind << " (" << e->key << "): " << e->payload.dump() << "\n";
    for (const auto& r : ctx.steps) {
        if (!r.ok) data << "failed step " << r.plan_step.action << ": " << r.error.dump() << "\n";
    }
    if (ctx.budget_exhausted) data << "The step budget ran out before planning finished.\n";
    if (data.tellp() == 0) data << "No data was gathered for this message.\n";

    return {{"system", sys.str()}, {"user", ctx.query + "\n\nData:\n" + data.str()}};
}

LlmResponder::LlmResponder(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {}

Response LlmResponder::respond(const ResponseContext& ctx) {
    try {
        Response response;
        response.text = backend_->complete({config_.model, render_responder_prompt(ctx), config_.temperature});
        attach_results(ctx, response);
        return response;
    } catch (const Error&) {
        auto response = fallback_.respond(ctx);
        response.degraded = true;
        return response;
    }
}

}  // namespace dietcha
