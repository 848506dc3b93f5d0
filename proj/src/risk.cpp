#include "dietcha/risk.h"

#include <cmath>

#include "dietcha/error.h"

namespace dietcha {

namespace {

void require_non_negative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::InvalidQuantity, std::string(what) + " must be finite and non-negative");
    }
}

bool within(const NutrientRule& rule, double v) {
    if (rule.lower_bound && v < *rule.lower_bound) return false;
    if (rule.upper_bound) {
        if (rule.upper_bound_inclusive ? v > *rule.upper_bound : v >= *rule.upper_bound) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(RiskLabel label) {
    switch (label) {
        case RiskLabel::Risky: return "Risky";
        case RiskLabel::NotRisky: return "NotRisky";
        case RiskLabel::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

std::optional<RiskLabel> risk_label_from_string(std::string_view s) {
    if (s == "Risky") return RiskLabel::Risky;
    if (s == "NotRisky") return RiskLabel::NotRisky;
    if (s == "Indeterminate") return RiskLabel::Indeterminate;
    return std::nullopt;
}

std::optional<double> percent_energy(double grams, double kcal_per_gram, double total_energy_kcal) {
    require_non_negative(grams, "grams");
    require_non_negative(total_energy_kcal, "total energy");
    if (!std::isfinite(kcal_per_gram) || kcal_per_gram <= 0.0) {
        throw Error(ErrorCode::InvalidQuantity, "energy factor must be finite and positive");
    }
    if (total_energy_kcal < kMinimumEnergyKcal) return std::nullopt;
    return 100.0 * grams * kcal_per_gram / total_energy_kcal;
}

RiskLabel classify_nutrient(const NutrientRule& rule, const RuleValue& value) {
    if (value.unit != rule.unit) {
        throw Error(ErrorCode::UnitMismatch,
                    "rule for " + std::string(to_string(rule.nutrient)) + " expects " +
                        std::string(to_string(rule.unit)) + ", got " + std::string(to_string(value.unit)),
                    {{"nutrient", std::string(to_string(rule.nutrient))},
                     {"expected", std::string(to_string(rule.unit))},
                     {"actual", std::string(to_string(value.unit))}});
    }
    if (!value.value) {
        if (rule.basis != RuleBasis::PercentOfEnergy) {
            throw Error(ErrorCode::InvalidQuantity, "Indeterminate is only valid for percent-of-energy rules");
        }
        return RiskLabel::Indeterminate;
    }
    require_non_negative(*value.value, "rule value");
    return within(rule, *value.value) ? RiskLabel::NotRisky : RiskLabel::Risky;
}

RuleValue rule_value_for(Nutrient n, const NutrientVector& totals, const GuidelineSet& guidelines) {
    const auto& rule = guidelines.rule(n);
    if (rule.basis == RuleBasis::PercentOfEnergy) {
        return RuleValue::percent(
            percent_energy(totals.amount(n), guidelines.energy_factor(n), totals.energy_kcal()));
    }
    return {totals.amount(n), rule.unit};
}

RiskReport assess_risk(const NutrientVector& totals, const GuidelineSet& guidelines) {
    RiskReport report;
    report.totals = totals;
    report.guideline_version = guidelines.version();
    for (Nutrient n : kAllNutrients) {
        if (is_macronutrient(n)) {
            report.percents[index_of(n)] =
                percent_energy(totals.amount(n), guidelines.energy_factor(n), totals.energy_kcal());
        }
        report.labels[index_of(n)] = classify_nutrient(guidelines.rule(n), rule_value_for(n, totals, guidelines));
    }
    return report;
}

nlohmann::json to_json(const RiskReport& report) {
    nlohmann::json labels = nlohmann::json::object();
    nlohmann::json percents = nlohmann::json::object();
    for (Nutrient n : kAllNutrients) {
        labels[std::string(to_string(n))] = std::string(to_string(report.label(n)));
        if (auto p = report.percent(n)) percents[std::string(to_string(n))] = *p;
    }
    return {
        {"guideline_version", report.guideline_version},
        {"totals", to_json(report.totals)},
        {"percents", std::move(percents)},
        {"labels", std::move(labels)},
    };
}

RiskReport risk_report_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("totals") || !j.contains("labels")) {
        throw Error(ErrorCode::SchemaViolation, "risk report needs totals and labels");
    }
    RiskReport report;
    report.totals = nutrient_vector_from_json(j.at("totals"));
    report.guideline_version = j.value("guideline_version", "");
    const auto& labels = j.at("labels");
    const auto percents = j.value("percents", nlohmann::json::object());
    for (Nutrient n : kAllNutrients) {
        const std::string key(to_string(n));
        if (!labels.contains(key) || !labels.at(key).is_string()) {
            throw Error(ErrorCode::SchemaViolation, "risk report is missing label for " + key);
        }
        auto label = risk_label_from_string(labels.at(key).get<std::string>());
        if (!label) throw Error(ErrorCode::SchemaViolation, "bad label for " + key);
        report.labels[index_of(n)] = *label;
        if (percents.contains(key)) report.percents[index_of(n)] = percents.at(key).get<double>();
    }
    return report;
}

}  // namespace dietcha
