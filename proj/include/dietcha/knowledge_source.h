#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/error.h"
#include "dietcha/food_index.h"
#include "dietcha/nutrients.h"

namespace dietcha {

/// A food that could not be resolved; the rest of the meal still counts.
struct ResolutionWarning {
    std::size_t position = 0;
    std::string name;
    ErrorCode code = ErrorCode::FoodNotFound;
    std::string message;
};

struct MealResolution {
    std::vector<ResolvedItem> items;
    NutrientVector total;
    std::vector<ResolutionWarning> warnings;
    /// Free-text remarks about how the source resolved the meal (e.g. which
    /// of several remote matches was taken).
    std::vector<std::string> notes;
};

nlohmann::json to_json(const ResolutionWarning& w);
nlohmann::json to_json(const MealResolution& m);

/// Parse, look up every item, and total. Unknown foods and units become
/// warnings; when nothing resolves, throws MealUnresolvable whose details
/// list the per-item failures. EmptyMeal and MalformedItem propagate.
MealResolution resolve_meal(std::string_view text, const FoodIndex& index);

/// Where food composition comes from. The orchestrator only sees this
/// interface, so the local database and the remote API are interchangeable.
class KnowledgeSource {
public:
    virtual ~KnowledgeSource() = default;

    virtual MealResolution resolve_meal(std::string_view text) const = 0;

    /// Cheap check used by the rule planner: does the text look like it
    /// describes food at all?
    virtual bool mentions_food(std::string_view text) const = 0;

    /// "local" or "remote".
    virtual std::string_view kind() const = 0;
};

class LocalKnowledgeBase final : public KnowledgeSource {
public:
    explicit LocalKnowledgeBase(std::shared_ptr<const FoodIndex> index);

    MealResolution resolve_meal(std::string_view text) const override;
    bool mentions_food(std::string_view text) const override;
    std::string_view kind() const override { return "local"; }

    const FoodIndex& index() const { return *index_; }

private:
    std::shared_ptr<const FoodIndex> index_;
};

}  // namespace dietcha
