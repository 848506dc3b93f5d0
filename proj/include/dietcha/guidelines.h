#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/nutrients.h"

namespace dietcha {

enum class RuleBasis { AbsoluteAmount, PercentOfEnergy };
enum class RuleUnit { Grams, Milligrams, Percent };

std::string_view to_string(RuleBasis basis);
std::string_view to_string(RuleUnit unit);

/// One guideline threshold. The lower bound is always inclusive; the upper
/// bound's inclusivity is explicit because "less than X" and "at most X"
/// rules coexist in the default set.
struct NutrientRule {
    Nutrient nutrient = Nutrient::Carbohydrate;
    RuleBasis basis = RuleBasis::AbsoluteAmount;
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
    bool upper_bound_inclusive = true;
    RuleUnit unit = RuleUnit::Grams;
    std::string provenance;

    friend bool operator==(const NutrientRule&, const NutrientRule&) = default;
};

/// Short human description of the accepted range, e.g. "20 to 35 g" or
/// "below 45% of energy".
std::string describe_range(const NutrientRule& rule);

struct AtwaterFactors {
    double carbohydrate = 4.0;
    double protein = 4.0;
    double fat = 9.0;

    friend bool operator==(const AtwaterFactors&, const AtwaterFactors&) = default;
};

/// Exactly one rule per tracked nutrient plus the energy conversion factors
/// the percent-of-energy rules need. Validated on construction
/// (ErrorCode::InvalidGuidelines) and immutable afterwards.
class GuidelineSet {
public:
    GuidelineSet(std::string version, std::vector<NutrientRule> rules, AtwaterFactors atwater = {});

    /// The ADA/AHA thresholds for diabetic daily intake, compiled in.
    static const GuidelineSet& ada_aha_default();

    const std::string& version() const { return version_; }
    const NutrientRule& rule(Nutrient n) const { return rules_[index_of(n)]; }
    const std::array<NutrientRule, kNutrientCount>& rules() const { return rules_; }
    const AtwaterFactors& atwater() const { return atwater_; }

    /// kcal per gram used to express `n` as percent of energy. Saturated fat
    /// uses the fat factor. Only defined for the four macronutrients.
    double energy_factor(Nutrient n) const;

    friend bool operator==(const GuidelineSet&, const GuidelineSet&) = default;

private:
    std::string version_;
    std::array<NutrientRule, kNutrientCount> rules_;
    AtwaterFactors atwater_;
};

/// Nutrients that may be expressed as a share of energy.
bool is_macronutrient(Nutrient n);

// guidelines.json
nlohmann::json to_json(const GuidelineSet& g);
GuidelineSet guidelines_from_json(const nlohmann::json& j);
GuidelineSet load_guidelines(const std::filesystem::path& path);

}  // namespace dietcha
