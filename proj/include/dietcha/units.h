#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace dietcha {

/// Canonical measurement tokens. CountServing is what a food gets when the
/// text names no unit at all ("2 eggs").
enum class Unit {
    G,
    Kg,
    Mg,
    Oz,
    Lb,
    Ml,
    L,
    Cup,
    Tbsp,
    Tsp,
    Slice,
    Piece,
    Serving,
    Bowl,
    Glass,
    CountServing,
};

/// Canonical token, e.g. "tbsp"; CountServing is "count".
std::string_view to_string(Unit unit);
std::optional<Unit> unit_from_string(std::string_view canonical);

/// Resolves a surface form ("tablespoons", "Tbsp", "lbs") to its unit.
/// Matching is case-insensitive; CountServing has no surface form.
std::optional<Unit> unit_from_alias(std::string_view surface);

/// Every (alias, unit) pair the parser recognises, lowercase.
const std::vector<std::pair<std::string_view, Unit>>& unit_aliases();

/// Grams per unit for pure mass units (g, kg, mg, oz, lb); nullopt otherwise.
std::optional<double> grams_per_mass_unit(Unit unit);

}  // namespace dietcha
