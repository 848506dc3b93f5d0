#include "dietcha/tasks.h"

#include "dietcha/error.h"
#include "dietcha/format.h"
#include "dietcha/risk.h"

namespace dietcha {

std::string TaskInputs::string(const std::string& name) const {
    auto it = literal.find(name);
    if (it == literal.end() || !it->is_string()) {
        throw Error(ErrorCode::InvalidTaskInput, "input '" + name + "' must be a string", {{"input", name}});
    }
    return it->get<std::string>();
}

const DataPipeEntry& TaskInputs::entry(const std::string& name) const {
    auto it = refs.find(name);
    if (it == refs.end() || !it->second) {
        throw Error(ErrorCode::InvalidTaskInput, "input '" + name + "' must be a $pipe: reference",
                    {{"input", name}});
    }
    return *it->second;
}

void TaskRegistry::add(std::shared_ptr<const Task> task) {
    if (find(task->descriptor().name)) {
        throw Error(ErrorCode::UnknownTask, "task '" + task->descriptor().name + "' is already registered");
    }
    tasks_.push_back(std::move(task));
}

std::shared_ptr<const Task> TaskRegistry::find(std::string_view name) const {
    for (const auto& t : tasks_) {
        if (t->descriptor().name == name) return t;
    }
    return nullptr;
}

std::vector<TaskDescriptor> TaskRegistry::descriptors() const {
    std::vector<TaskDescriptor> out;
    for (const auto& t : tasks_) out.push_back(t->descriptor());
    return out;
}

MealNutritionLookupTask::MealNutritionLookupTask(std::shared_ptr<const KnowledgeSource> source)
    : source_(std::move(source)),
      descriptor_{std::string(kMealLookupTask),
                  "Looks up the nutrients of foods described in free text (for example \"2 slices of whole wheat "
                  "toast and a boiled egg\") in the food knowledge base. Returns each resolved food with its mass "
                  "and nutrients, the meal totals, the running totals for the day, and warnings for foods that "
                  "could not be found.",
                  {{"meal", "the user's meal description, verbatim"}},
                  std::string(kMealNutritionKind)} {}

nlohmann::json MealNutritionLookupTask::run(const TaskInputs& inputs, const TaskContext& ctx) const {
    const auto meal = inputs.string("meal");
    const auto resolution = source_->resolve_meal(meal);

    NutrientVector day = resolution.total;
    nlohmann::json previous = nullptr;
    if (auto prior = ctx.pipe.latest(kMealNutritionKind)) {
        day = nutrient_vector_from_json(prior->payload.at("day_totals")) + resolution.total;
        previous = prior->key;
    }

    auto payload = to_json(resolution);
    payload["meal_text"] = meal;
    payload["source"] = std::string(source_->kind());
    payload["day_totals"] = to_json(day);
    payload["previous_key"] = previous;
    return payload;
}

DietRiskAssessmentTask::DietRiskAssessmentTask(std::shared_ptr<const GuidelineSet> guidelines)
    : guidelines_(std::move(guidelines)),
      descriptor_{std::string(kRiskAssessmentTask),
                  "Compares a day's nutrient totals with the diabetes dietary guidelines (carbohydrate, fat and "
                  "saturated fat, and protein as percent of energy; sodium, sugars and dietary fiber as daily "
                  "amounts) and labels each of the seven nutrients Risky or NotRisky.",
                  {{"nutrition", "a $pipe: reference to a meal_nutrition_lookup result"}},
                  std::string(kRiskReportKind)} {}

nlohmann::json DietRiskAssessmentTask::run(const TaskInputs& inputs, const TaskContext&) const {
    const auto& source = inputs.entry("nutrition");
    if (source.kind != kMealNutritionKind) {
        throw Error(ErrorCode::InvalidTaskInput,
                    "entry '" + source.key + "' holds " + source.kind + ", expected " + std::string(kMealNutritionKind),
                    {{"key", source.key}});
    }
    const auto totals = nutrient_vector_from_json(source.payload.at("day_totals"));
    const auto report = assess_risk(totals, *guidelines_);

    auto payload = to_json(report);
    payload["source_key"] = source.key;
    payload["warnings"] = source.payload.value("warnings", nlohmann::json::array());
    payload["display"] = risk_display_block(report, *guidelines_);
    return payload;
}

nlohmann::json risk_display_block(const RiskReport& report, const GuidelineSet& guidelines) {
    nlohmann::json nutrients = nlohmann::json::object();
    for (Nutrient n : kAllNutrients) {
        nlohmann::json d = {
            {"name", std::string(display_name(n))},
            {"amount", format_fixed(report.totals.amount(n), 2)},
            {"unit", n == Nutrient::Sodium ? "mg" : "g"},
            {"label", std::string(to_string(report.label(n)))},
            {"guideline", describe_range(guidelines.rule(n))},
        };
        if (auto p = report.percent(n)) d["percent"] = format_fixed(*p, 2);
        nutrients[std::string(to_string(n))] = std::move(d);
    }
    return {{"energy_kcal", format_fixed(report.totals.energy_kcal(), 2)}, {"nutrients", std::move(nutrients)}};
}

}  // namespace dietcha
