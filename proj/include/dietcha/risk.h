#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dietcha/guidelines.h"
#include "dietcha/nutrients.h"

namespace dietcha {

enum class RiskLabel { Risky, NotRisky, Indeterminate };

std::string_view to_string(RiskLabel label);
std::optional<RiskLabel> risk_label_from_string(std::string_view s);

/// Below this total energy (kcal) percent-of-energy values are undefined.
inline constexpr double kMinimumEnergyKcal = 1.0;

/// A measured value expressed in a rule's unit. An empty `value` is the
/// Indeterminate sentinel and is only meaningful in percent units.
struct RuleValue {
    std::optional<double> value;
    RuleUnit unit = RuleUnit::Grams;

    static RuleValue grams(double v) { return {v, RuleUnit::Grams}; }
    static RuleValue milligrams(double v) { return {v, RuleUnit::Milligrams}; }
    static RuleValue percent(std::optional<double> v) { return {v, RuleUnit::Percent}; }
    static RuleValue indeterminate() { return {std::nullopt, RuleUnit::Percent}; }
};

/// 100 * grams * kcal_per_gram / total_energy_kcal, or nullopt (Indeterminate)
/// when total energy is below kMinimumEnergyKcal.
/// Throws InvalidQuantity for negative or non-finite inputs, or a factor <= 0.
std::optional<double> percent_energy(double grams, double kcal_per_gram, double total_energy_kcal);

/// NotRisky iff the value satisfies every bound the rule states; no epsilon.
/// Throws UnitMismatch when the value is not in the rule's unit.
RiskLabel classify_nutrient(const NutrientRule& rule, const RuleValue& value);

/// Per-nutrient classification of one day's (or meal's) totals. Every label
/// is a pure function of `totals` and the guideline set that produced it.
struct RiskReport {
    NutrientVector totals;
    /// Percent of energy for the four macronutrients; empty when energy is
    /// degenerate and always empty for sodium, sugars and fiber.
    std::array<std::optional<double>, kNutrientCount> percents{};
    std::array<RiskLabel, kNutrientCount> labels{};
    std::string guideline_version;

    RiskLabel label(Nutrient n) const { return labels[index_of(n)]; }
    std::optional<double> percent(Nutrient n) const { return percents[index_of(n)]; }

    friend bool operator==(const RiskReport&, const RiskReport&) = default;
};

RiskReport assess_risk(const NutrientVector& totals, const GuidelineSet& guidelines);

/// Value of `n` in the unit its rule expects.
RuleValue rule_value_for(Nutrient n, const NutrientVector& totals, const GuidelineSet& guidelines);

nlohmann::json to_json(const RiskReport& report);
RiskReport risk_report_from_json(const nlohmann::json& j);

}  // namespace dietcha
