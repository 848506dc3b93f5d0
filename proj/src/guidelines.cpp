#include "dietcha/guidelines.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dietcha/error.h"
#include "dietcha/format.h"

namespace dietcha {

namespace {

[[noreturn]] void invalid(const std::string& message, nlohmann::json details = nlohmann::json::object()) {
    throw Error(ErrorCode::InvalidGuidelines, message, std::move(details));
}

RuleUnit natural_unit(Nutrient n) {
    return n == Nutrient::Sodium ? RuleUnit::Milligrams : RuleUnit::Grams;
}

void validate_rule(const NutrientRule& r) {
    const std::string name(to_string(r.nutrient));
    if (!r.lower_bound && !r.upper_bound) invalid("rule for " + name + " has no bound");
    for (const auto& b : {r.lower_bound, r.upper_bound}) {
        if (b && (!std::isfinite(*b) || *b < 0.0)) invalid("rule for " + name + " has a negative or non-finite bound");
    }
    if (r.lower_bound && r.upper_bound) {
        if (*r.lower_bound > *r.upper_bound) invalid("rule for " + name + " has lower_bound > upper_bound");
        if (!r.upper_bound_inclusive && *r.lower_bound == *r.upper_bound) {
            invalid("rule for " + name + " accepts no value");
        }
    }
    if (r.basis == RuleBasis::PercentOfEnergy) {
        if (!is_macronutrient(r.nutrient)) invalid(name + " cannot be expressed as percent of energy");
        if (r.unit != RuleUnit::Percent) invalid("percent-of-energy rule for " + name + " must use unit 'percent'");
    } else if (r.unit != natural_unit(r.nutrient)) {
        invalid("absolute rule for " + name + " must use unit '" + std::string(to_string(natural_unit(r.nutrient))) + "'");
    }
}

std::optional<double> optional_bound(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) invalid(std::string(key) + " must be a number");
    return it->get<double>();
}

std::string required_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) invalid(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

RuleBasis basis_from_string(const std::string& s) {
    if (s == "absolute-amount") return RuleBasis::AbsoluteAmount;
    if (s == "percent-of-energy") return RuleBasis::PercentOfEnergy;
    invalid("unknown basis '" + s + "'");
}

RuleUnit unit_from_string(const std::string& s) {
    if (s == "grams") return RuleUnit::Grams;
    if (s == "milligrams") return RuleUnit::Milligrams;
    if (s == "percent") return RuleUnit::Percent;
    invalid("unknown unit '" + s + "'");
}

double positive_factor(const nlohmann::json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) invalid(std::string(key) + " must be a number");
    return it->get<double>();
}

}  // namespace

std::string_view to_string(RuleBasis basis) {
    return basis == RuleBasis::AbsoluteAmount ? "absolute-amount" : "percent-of-energy";
}

std::string_view to_string(RuleUnit unit) {
    switch (unit) {
        case RuleUnit::Grams: return "grams";
        case RuleUnit::Milligrams: return "milligrams";
        case RuleUnit::Percent: return "percent";
    }
    return "grams";
}

bool is_macronutrient(Nutrient n) {
    return n == Nutrient::Carbohydrate || n == Nutrient::Fat || n == Nutrient::SaturatedFat ||
           n == Nutrient::Protein;
}

std::string describe_range(const NutrientRule& rule) {
    const std::string suffix = rule.unit == RuleUnit::Percent      ? "% of energy"
                               : rule.unit == RuleUnit::Milligrams ? " mg"
                                                                   : " g";
    if (rule.lower_bound && rule.upper_bound) {
        std::string out = format_compact(*rule.lower_bound) + " to " + format_compact(*rule.upper_bound) + suffix;
        if (!rule.upper_bound_inclusive) out += " (upper bound exclusive)";
        return out;
    }
    if (rule.upper_bound) {
        return (rule.upper_bound_inclusive ? "at most " : "below ") + format_compact(*rule.upper_bound) + suffix;
    }
    return "at least " + format_compact(*rule.lower_bound) + suffix;
}

GuidelineSet::GuidelineSet(std::string version, std::vector<NutrientRule> rules, AtwaterFactors atwater)
    : version_(std::move(version)), atwater_(atwater) {
    if (version_.empty()) invalid("guideline version must not be empty");
    if (rules.size() != kNutrientCount) {
        invalid("expected exactly 7 rules", {{"count", rules.size()}});
    }
    std::array<bool, kNutrientCount> seen{};
    for (const auto& r : rules) {
        validate_rule(r);
        auto& slot = seen[index_of(r.nutrient)];
        if (slot) invalid("duplicate rule for " + std::string(to_string(r.nutrient)));
        slot = true;
        rules_[index_of(r.nutrient)] = r;
    }
    for (double f : {atwater_.carbohydrate, atwater_.protein, atwater_.fat}) {
        if (!std::isfinite(f) || f <= 0.0) invalid("Atwater factors must be positive");
    }
}

double GuidelineSet::energy_factor(Nutrient n) const {
    switch (n) {
        case Nutrient::Carbohydrate: return atwater_.carbohydrate;
        case Nutrient::Protein: return atwater_.protein;
        case Nutrient::Fat:
        case Nutrient::SaturatedFat: return atwater_.fat;
        default: invalid(std::string(to_string(n)) + " has no energy factor");
    }
}

const GuidelineSet& GuidelineSet::ada_aha_default() {
    static const GuidelineSet kDefault(
        "ada-aha-2019",
        {
            {Nutrient::Carbohydrate, RuleBasis::PercentOfEnergy, std::nullopt, 45.0, false, RuleUnit::Percent,
             "Gray & Threlkeld 2019, Nutritional Recommendations for Individuals with Diabetes; US adults "
             "with diabetes consume about 45% of energy as carbohydrate"},
            {Nutrient::Fat, RuleBasis::PercentOfEnergy, 20.0, 35.0, true, RuleUnit::Percent,
             "Millen et al. 2014; Snell-Bergeon et al. 2009; total fat 20-35% of energy"},
            {Nutrient::SaturatedFat, RuleBasis::PercentOfEnergy, std::nullopt, 10.0, false, RuleUnit::Percent,
             "Van Horn et al. 2008 (AHA); saturated fat below 10% of energy"},
            {Nutrient::Protein, RuleBasis::PercentOfEnergy, 15.0, 20.0, true, RuleUnit::Percent,
             "ADA Standards of Medical Care in Diabetes 2019; protein 15-20% of energy"},
            {Nutrient::Sodium, RuleBasis::AbsoluteAmount, std::nullopt, 2300.0, true, RuleUnit::Milligrams,
             "ADA Standards of Medical Care in Diabetes 2019; limit sodium to 2,300 mg/day"},
            {Nutrient::Sugars, RuleBasis::AbsoluteAmount, std::nullopt, 25.0, true, RuleUnit::Grams,
             "Johnson et al. 2009 (AHA), Dietary Sugars Intake and Cardiovascular Health; at most 6 teaspoons (25 g) per day"},
            {Nutrient::DietaryFiber, RuleBasis::AbsoluteAmount, 20.0, 35.0, true, RuleUnit::Grams,
             "ADA Standards of Medical Care in Diabetes 2019; 20-35 g fiber per day"},
        });
    return kDefault;
}

nlohmann::json to_json(const GuidelineSet& g) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : g.rules()) {
        nlohmann::json jr = {
            {"nutrient", std::string(to_string(r.nutrient))},
            {"basis", std::string(to_string(r.basis))},
            {"upper_bound_inclusive", r.upper_bound_inclusive},
            {"unit", std::string(to_string(r.unit))},
            {"provenance", r.provenance},
        };
        if (r.lower_bound) jr["lower_bound"] = *r.lower_bound;
        if (r.upper_bound) jr["upper_bound"] = *r.upper_bound;
        rules.push_back(std::move(jr));
    }
    return {
        {"version", g.version()},
        {"atwater",
         {{"carbohydrate", g.atwater().carbohydrate}, {"protein", g.atwater().protein}, {"fat", g.atwater().fat}}},
        {"rules", std::move(rules)},
    };
}

GuidelineSet guidelines_from_json(const nlohmann::json& j) {
    if (!j.is_object()) invalid("guidelines document must be an object");
    AtwaterFactors atwater;
    if (auto it = j.find("atwater"); it != j.end()) {
        if (!it->is_object()) invalid("atwater must be an object");
        atwater.carbohydrate = positive_factor(*it, "carbohydrate", atwater.carbohydrate);
        atwater.protein = positive_factor(*it, "protein", atwater.protein);
        atwater.fat = positive_factor(*it, "fat", atwater.fat);
    }
    auto rules_it = j.find("rules");
    if (rules_it == j.end() || !rules_it->is_array()) invalid("rules must be an array");

    std::vector<NutrientRule> rules;
    for (const auto& jr : *rules_it) {
        if (!jr.is_object()) invalid("each rule must be an object");
        NutrientRule r;
        const auto name = required_string(jr, "nutrient");
        auto n = nutrient_from_string(name);
        if (!n) invalid("unknown nutrient '" + name + "'");
        r.nutrient = *n;
        r.basis = basis_from_string(required_string(jr, "basis"));
        r.unit = unit_from_string(required_string(jr, "unit"));
        r.lower_bound = optional_bound(jr, "lower_bound");
        r.upper_bound = optional_bound(jr, "upper_bound");
        if (auto it = jr.find("upper_bound_inclusive"); it != jr.end()) {
            if (!it->is_boolean()) invalid("upper_bound_inclusive must be a boolean");
            r.upper_bound_inclusive = it->get<bool>();
        }
        if (auto it = jr.find("provenance"); it != jr.end() && it->is_string()) r.provenance = it->get<std::string>();
        rules.push_back(std::move(r));
    }
    return GuidelineSet(required_string(j, "version"), std::move(rules), atwater);
}

GuidelineSet load_guidelines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open guidelines file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        invalid("guidelines file is not valid JSON: " + std::string(e.what()));
    }
    return guidelines_from_json(j);
}

}  // namespace dietcha
