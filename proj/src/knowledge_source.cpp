#include "dietcha/knowledge_source.h"

#include "dietcha/format.h"

namespace dietcha {

nlohmann::json to_json(const ResolutionWarning& w) {
    return {
        {"position", w.position},
        {"name", w.name},
        {"code", std::string(to_string(w.code))},
        {"message", w.message},
    };
}

nlohmann::json to_json(const MealResolution& m) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : m.items) items.push_back(to_json(item));
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto& w : m.warnings) warnings.push_back(to_json(w));
    return {
        {"items", std::move(items)},
        {"totals", to_json(m.total)},
        {"warnings", std::move(warnings)},
        {"notes", m.notes},
    };
}

MealResolution resolve_meal(std::string_view text, const FoodIndex& index) {
    const auto foods = parse_meal(text);
    MealResolution out;
    std::vector<NutrientVector> parts;
    for (std::size_t i = 0; i < foods.size(); ++i) {
        try {
            out.items.push_back(lookup(foods[i], index));
            parts.push_back(out.items.back().nutrients);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FoodNotFound && e.code() != ErrorCode::UnknownUnit) throw;
            out.warnings.push_back({i, foods[i].name, e.code(), e.what()});
        }
    }
    if (out.items.empty()) {
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& w : out.warnings) failures.push_back(to_json(w));
        throw Error(ErrorCode::MealUnresolvable, "none of the foods in the meal could be resolved",
                    {{"failures", std::move(failures)}});
    }
    out.total = aggregate(parts);
    return out;
}

LocalKnowledgeBase::LocalKnowledgeBase(std::shared_ptr<const FoodIndex> index) : index_(std::move(index)) {}

MealResolution LocalKnowledgeBase::resolve_meal(std::string_view text) const {
    return dietcha::resolve_meal(text, *index_);
}

bool LocalKnowledgeBase::mentions_food(std::string_view text) const {
    try {
        const auto parsed = parse_meal_detailed(text);
        // A known food, or anything measured ("2 zorblax", "a cup of zorblax")
        // so unknown foods get an honest lookup failure instead of silence.
        for (const auto& item : parsed.items) {
            const auto kind = parsed.tokens[item.first_token].kind;
            if (item.has_unit || kind == MealTokenKind::Number || kind == MealTokenKind::Fraction) return true;
            if (index_->find(item.food.name)) return true;
        }
    } catch (const Error&) {
    }
    return false;
}

}  // namespace dietcha
