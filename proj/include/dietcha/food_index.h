#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/meal_parser.h"
#include "dietcha/nutrients.h"
#include "dietcha/units.h"

namespace dietcha {

struct Serving {
    Unit unit = Unit::CountServing;
    double grams_per_unit = 0.0;

    friend bool operator==(const Serving&, const Serving&) = default;
};

/// One food-composition entry. Nutrients are per 100 g; servings map
/// non-mass units onto grams. Every record has a CountServing entry.
struct FoodRecord {
    std::string food_id;
    std::string name;
    std::vector<std::string> aliases;
    NutrientVector per_100g;
    std::vector<Serving> servings;

    const Serving* serving(Unit unit) const;

    friend bool operator==(const FoodRecord&, const FoodRecord&) = default;
};

/// Parses and validates one foods.jsonl object. Names and aliases are
/// normalized with normalize_name(). Throws SchemaViolation.
FoodRecord food_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FoodRecord& record);

/// Immutable name/alias -> record index over a food database.
class FoodIndex {
public:
    FoodIndex() = default;
    /// Throws DuplicateAlias when two keys collide after normalization.
    explicit FoodIndex(std::vector<FoodRecord> records);

    /// JSON Lines, one record per line; blank lines are skipped.
    /// Throws SchemaViolation (details.line, 1-based) or DuplicateAlias.
    static FoodIndex ingest(std::istream& in);
    static FoodIndex ingest(const std::filesystem::path& path);

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::vector<std::shared_ptr<const FoodRecord>>& records() const { return records_; }

    /// Exact match of normalize_name(name) against names and aliases.
    std::shared_ptr<const FoodRecord> find(std::string_view name) const;

    void write_jsonl(std::ostream& out) const;

    friend bool operator==(const FoodIndex& lhs, const FoodIndex& rhs);

private:
    std::vector<std::shared_ptr<const FoodRecord>> records_;
    std::unordered_map<std::string, std::size_t> by_key_;
};

struct ResolvedItem {
    QuantifiedFood source;
    std::shared_ptr<const FoodRecord> record;
    double mass_g = 0.0;
    NutrientVector nutrients;
};

/// Resolves one parsed item. Mass units convert directly; every other unit
/// needs a matching serving entry. Throws FoodNotFound or UnknownUnit.
ResolvedItem lookup(const QuantifiedFood& item, const FoodIndex& index);

nlohmann::json to_json(const ResolvedItem& item);

}  // namespace dietcha
