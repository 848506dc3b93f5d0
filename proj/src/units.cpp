#include "dietcha/units.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace dietcha {

namespace {

constexpr std::array<std::pair<std::string_view, Unit>, 16> kCanonical = {{
    {"g", Unit::G},
    {"kg", Unit::Kg},
    {"mg", Unit::Mg},
    {"oz", Unit::Oz},
    {"lb", Unit::Lb},
    {"ml", Unit::Ml},
    {"l", Unit::L},
    {"cup", Unit::Cup},
    {"tbsp", Unit::Tbsp},
    {"tsp", Unit::Tsp},
    {"slice", Unit::Slice},
    {"piece", Unit::Piece},
    {"serving", Unit::Serving},
    {"bowl", Unit::Bowl},
    {"glass", Unit::Glass},
    {"count", Unit::CountServing},
}};

}  // namespace

std::string_view to_string(Unit unit) {
    for (const auto& [name, u] : kCanonical) {
        if (u == unit) return name;
    }
    return "count";
}

std::optional<Unit> unit_from_string(std::string_view canonical) {
    for (const auto& [name, u] : kCanonical) {
        if (name == canonical) return u;
    }
    return std::nullopt;
}

const std::vector<std::pair<std::string_view, Unit>>& unit_aliases() {
    static const std::vector<std::pair<std::string_view, Unit>> kAliases = {
        {"g", Unit::G},           {"gram", Unit::G},          {"grams", Unit::G},
        {"gr", Unit::G},          {"kg", Unit::Kg},           {"kgs", Unit::Kg},
        {"kilogram", Unit::Kg},   {"kilograms", Unit::Kg},    {"mg", Unit::Mg},
        {"milligram", Unit::Mg},  {"milligrams", Unit::Mg},   {"oz", Unit::Oz},
        {"ounce", Unit::Oz},      {"ounces", Unit::Oz},       {"lb", Unit::Lb},
        {"lbs", Unit::Lb},        {"pound", Unit::Lb},        {"pounds", Unit::Lb},
        {"ml", Unit::Ml},         {"milliliter", Unit::Ml},   {"milliliters", Unit::Ml},
        {"millilitre", Unit::Ml}, {"millilitres", Unit::Ml},  {"l", Unit::L},
        {"liter", Unit::L},       {"liters", Unit::L},        {"litre", Unit::L},
        {"litres", Unit::L},      {"cup", Unit::Cup},         {"cups", Unit::Cup},
        {"tbsp", Unit::Tbsp},     {"tbsps", Unit::Tbsp},      {"tbs", Unit::Tbsp},
        {"tablespoon", Unit::Tbsp}, {"tablespoons", Unit::Tbsp}, {"tsp", Unit::Tsp},
        {"tsps", Unit::Tsp},      {"teaspoon", Unit::Tsp},    {"teaspoons", Unit::Tsp},
        {"slice", Unit::Slice},   {"slices", Unit::Slice},    {"piece", Unit::Piece},
        {"pieces", Unit::Piece},  {"pc", Unit::Piece},        {"pcs", Unit::Piece},
        {"serving", Unit::Serving}, {"servings", Unit::Serving}, {"bowl", Unit::Bowl},
        {"bowls", Unit::Bowl},    {"glass", Unit::Glass},     {"glasses", Unit::Glass},
    };
    return kAliases;
}

std::optional<Unit> unit_from_alias(std::string_view surface) {
    std::string lower(surface);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& [alias, unit] : unit_aliases()) {
        if (alias == lower) return unit;
    }
    return std::nullopt;
}

std::optional<double> grams_per_mass_unit(Unit unit) {
    switch (unit) {
        case Unit::G: return 1.0;
        case Unit::Kg: return 1000.0;
        case Unit::Mg: return 0.001;
        case Unit::Oz: return 28.3495;
        case Unit::Lb: return 453.592;
        default: return std::nullopt;
    }
}

}  // namespace dietcha
