#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/data_pipe.h"
#include "dietcha/guidelines.h"
#include "dietcha/knowledge_source.h"
#include "dietcha/risk.h"

namespace dietcha {

struct TaskParameter {
    std::string name;
    std::string description;
};

struct TaskDescriptor {
    std::string name;
    /// Capability statement shown to the planner.
    std::string description;
    std::vector<TaskParameter> inputs;
    std::string output_kind;
};

/// Task inputs after "$pipe:" references have been resolved by the executor.
struct TaskInputs {
    nlohmann::json literal = nlohmann::json::object();
    std::map<std::string, std::shared_ptr<const DataPipeEntry>> refs;

    /// Throws InvalidTaskInput when absent or not a string.
    std::string string(const std::string& name) const;
    /// Throws InvalidTaskInput when `name` was not given as a pipe reference.
    const DataPipeEntry& entry(const std::string& name) const;
};

struct TaskContext {
    const DataPipe& pipe;
    std::size_t turn = 0;
};

class Task {
public:
    virtual ~Task() = default;
    virtual const TaskDescriptor& descriptor() const = 0;
    /// Returns the payload to store in the data pipe. Errors are thrown as
    /// dietcha::Error and captured by the executor.
    virtual nlohmann::json run(const TaskInputs& inputs, const TaskContext& ctx) const = 0;
};

class TaskRegistry {
public:
    /// Throws UnknownTask if a task with the same name is already present.
    void add(std::shared_ptr<const Task> task);
    std::shared_ptr<const Task> find(std::string_view name) const;
    std::vector<TaskDescriptor> descriptors() const;
    bool empty() const { return tasks_.empty(); }

private:
    std::vector<std::shared_ptr<const Task>> tasks_;
};

inline constexpr std::string_view kMealLookupTask = "meal_nutrition_lookup";
inline constexpr std::string_view kRiskAssessmentTask = "diet_risk_assessment";
inline constexpr std::string_view kMealNutritionKind = "meal_nutrition";
inline constexpr std::string_view kRiskReportKind = "risk_report";

/// Resolves a meal description through a knowledge source and adds the
/// result to the session's running day totals.
class MealNutritionLookupTask final : public Task {
public:
    explicit MealNutritionLookupTask(std::shared_ptr<const KnowledgeSource> source);
    const TaskDescriptor& descriptor() const override { return descriptor_; }
    nlohmann::json run(const TaskInputs& inputs, const TaskContext& ctx) const override;

private:
    std::shared_ptr<const KnowledgeSource> source_;
    TaskDescriptor descriptor_;
};

/// Classifies the day totals of a meal_nutrition entry against the guidelines.
class DietRiskAssessmentTask final : public Task {
public:
    explicit DietRiskAssessmentTask(std::shared_ptr<const GuidelineSet> guidelines);
    const TaskDescriptor& descriptor() const override { return descriptor_; }
    nlohmann::json run(const TaskInputs& inputs, const TaskContext& ctx) const override;

private:
    std::shared_ptr<const GuidelineSet> guidelines_;
    TaskDescriptor descriptor_;
};

/// Preformatted strings for every number a response may quote, so answers
/// can cite payload text verbatim.
nlohmann::json risk_display_block(const RiskReport& report, const GuidelineSet& guidelines);

}  // namespace dietcha
