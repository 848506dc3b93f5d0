#include "dietcha/nutrients.h"

#include <cmath>
#include <string>

#include "dietcha/error.h"

namespace dietcha {

namespace {

constexpr std::array<std::string_view, kNutrientCount> kWireNames = {
    "carbohydrate", "fat", "saturated_fat", "protein", "sodium", "sugars", "dietary_fiber",
};

constexpr std::array<std::string_view, kNutrientCount> kDisplayNames = {
    "Carbohydrate", "Fat", "Saturated Fat", "Protein", "Sodium", "Sugars", "Dietary Fiber",
};

void require_valid_field(double value, std::string_view field) {
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(ErrorCode::InvalidQuantity,
                    std::string(field) + " must be finite and non-negative",
                    {{"field", std::string(field)}, {"value", std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(std::to_string(value))}});
    }
}

double required_number(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw Error(ErrorCode::SchemaViolation, std::string("missing numeric field '") + key + "'",
                    {{"field", key}});
    }
    return it->get<double>();
}

}  // namespace

std::string_view to_string(Nutrient n) { return kWireNames[index_of(n)]; }

std::string_view display_name(Nutrient n) { return kDisplayNames[index_of(n)]; }

std::optional<Nutrient> nutrient_from_string(std::string_view s) {
    for (Nutrient n : kAllNutrients) {
        if (kWireNames[index_of(n)] == s) return n;
    }
    return std::nullopt;
}

NutrientVector::NutrientVector(const NutrientAmounts& amounts) : a_(amounts) {
    require_valid_field(a_.energy_kcal, "energy_kcal");
    require_valid_field(a_.carbohydrate_g, "carbohydrate_g");
    require_valid_field(a_.fat_g, "fat_g");
    require_valid_field(a_.saturated_fat_g, "saturated_fat_g");
    require_valid_field(a_.protein_g, "protein_g");
    require_valid_field(a_.sodium_mg, "sodium_mg");
    require_valid_field(a_.sugars_g, "sugars_g");
    require_valid_field(a_.fiber_g, "fiber_g");
    if (a_.saturated_fat_g > a_.fat_g) {
        throw Error(ErrorCode::InvalidQuantity, "saturated fat exceeds total fat",
                    {{"saturated_fat_g", a_.saturated_fat_g}, {"fat_g", a_.fat_g}});
    }
    if (a_.sugars_g > a_.carbohydrate_g) {
        throw Error(ErrorCode::InvalidQuantity, "sugars exceed total carbohydrate",
                    {{"sugars_g", a_.sugars_g}, {"carbohydrate_g", a_.carbohydrate_g}});
    }
}

double NutrientVector::amount(Nutrient n) const {
    switch (n) {
        case Nutrient::Carbohydrate: return a_.carbohydrate_g;
        case Nutrient::Fat: return a_.fat_g;
        case Nutrient::SaturatedFat: return a_.saturated_fat_g;
        case Nutrient::Protein: return a_.protein_g;
        case Nutrient::Sodium: return a_.sodium_mg;
        case Nutrient::Sugars: return a_.sugars_g;
        case Nutrient::DietaryFiber: return a_.fiber_g;
    }
    return 0.0;
}

NutrientVector NutrientVector::scaled(double factor) const {
    if (!std::isfinite(factor) || factor < 0.0) {
        throw Error(ErrorCode::InvalidQuantity, "scale factor must be finite and non-negative");
    }
    return NutrientVector(NutrientAmounts{
        a_.energy_kcal * factor,
        a_.carbohydrate_g * factor,
        a_.fat_g * factor,
        a_.saturated_fat_g * factor,
        a_.protein_g * factor,
        a_.sodium_mg * factor,
        a_.sugars_g * factor,
        a_.fiber_g * factor,
    });
}

NutrientVector operator+(const NutrientVector& lhs, const NutrientVector& rhs) {
    const auto& l = lhs.a_;
    const auto& r = rhs.a_;
    // Overflow to infinity is caught by the constructor.
    return NutrientVector(NutrientAmounts{
        l.energy_kcal + r.energy_kcal,
        l.carbohydrate_g + r.carbohydrate_g,
        l.fat_g + r.fat_g,
        l.saturated_fat_g + r.saturated_fat_g,
        l.protein_g + r.protein_g,
        l.sodium_mg + r.sodium_mg,
        l.sugars_g + r.sugars_g,
        l.fiber_g + r.fiber_g,
    });
}

bool operator==(const NutrientVector& lhs, const NutrientVector& rhs) {
    const auto& l = lhs.a_;
    const auto& r = rhs.a_;
    return l.energy_kcal == r.energy_kcal && l.carbohydrate_g == r.carbohydrate_g &&
           l.fat_g == r.fat_g && l.saturated_fat_g == r.saturated_fat_g &&
           l.protein_g == r.protein_g && l.sodium_mg == r.sodium_mg &&
           l.sugars_g == r.sugars_g && l.fiber_g == r.fiber_g;
}

NutrientVector aggregate(std::span<const NutrientVector> items) {
    NutrientVector total;
    for (const auto& item : items) total = total + item;
    return total;
}

nlohmann::json to_json(const NutrientVector& v) {
    return {
        {"energy_kcal", v.energy_kcal()},         {"carbohydrate_g", v.carbohydrate_g()},
        {"fat_g", v.fat_g()},                     {"saturated_fat_g", v.saturated_fat_g()},
        {"protein_g", v.protein_g()},             {"sodium_mg", v.sodium_mg()},
        {"sugars_g", v.sugars_g()},               {"fiber_g", v.fiber_g()},
    };
}

NutrientVector nutrient_vector_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "nutrient block must be an object");
    return NutrientVector(NutrientAmounts{
        required_number(j, "energy_kcal"),
        required_number(j, "carbohydrate_g"),
        required_number(j, "fat_g"),
        required_number(j, "saturated_fat_g"),
        required_number(j, "protein_g"),
        required_number(j, "sodium_mg"),
        required_number(j, "sugars_g"),
        required_number(j, "fiber_g"),
    });
}

}  // namespace dietcha
