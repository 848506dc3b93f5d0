#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

namespace dietcha {

// The seven tracked nutrients, in assessment-table column order.
enum class Nutrient : std::size_t {
    Carbohydrate,
    Fat,
    SaturatedFat,
    Protein,
    Sodium,
    Sugars,
    DietaryFiber,
};

inline constexpr std::size_t kNutrientCount = 7;

inline constexpr std::array<Nutrient, kNutrientCount> kAllNutrients = {
    Nutrient::Carbohydrate, Nutrient::Fat,    Nutrient::SaturatedFat, Nutrient::Protein,
    Nutrient::Sodium,       Nutrient::Sugars, Nutrient::DietaryFiber,
};

constexpr std::size_t index_of(Nutrient n) { return static_cast<std::size_t>(n); }

/// Wire identifier, e.g. "saturated_fat".
std::string_view to_string(Nutrient n);
/// Human-readable column title, e.g. "Saturated Fat".
std::string_view display_name(Nutrient n);
std::optional<Nutrient> nutrient_from_string(std::string_view s);

struct NutrientAmounts {
    double energy_kcal = 0.0;
    double carbohydrate_g = 0.0;
    double fat_g = 0.0;
    double saturated_fat_g = 0.0;
    double protein_g = 0.0;
    double sodium_mg = 0.0;
    double sugars_g = 0.0;
    double fiber_g = 0.0;
};

/// Nutrient totals for a food portion, a meal, or a day.
///
/// Every field is finite and non-negative, saturated fat never exceeds fat
/// and sugars never exceed carbohydrate. Construction rejects anything else
/// with ErrorCode::InvalidQuantity, so a NutrientVector in hand is always
/// valid. Instances are immutable.
class NutrientVector {
public:
    NutrientVector() = default;
    explicit NutrientVector(const NutrientAmounts& amounts);

    double energy_kcal() const { return a_.energy_kcal; }
    double carbohydrate_g() const { return a_.carbohydrate_g; }
    double fat_g() const { return a_.fat_g; }
    double saturated_fat_g() const { return a_.saturated_fat_g; }
    double protein_g() const { return a_.protein_g; }
    double sodium_mg() const { return a_.sodium_mg; }
    double sugars_g() const { return a_.sugars_g; }
    double fiber_g() const { return a_.fiber_g; }

    /// Amount of one tracked nutrient in its natural unit (g, or mg for sodium).
    double amount(Nutrient n) const;
    const NutrientAmounts& amounts() const { return a_; }

    /// Field-wise multiple; factor must be finite and >= 0.
    NutrientVector scaled(double factor) const;

    friend NutrientVector operator+(const NutrientVector& lhs, const NutrientVector& rhs);
    friend bool operator==(const NutrientVector& lhs, const NutrientVector& rhs);

private:
    NutrientAmounts a_{};
};

/// Field-wise sum; an empty span yields the all-zero vector.
NutrientVector aggregate(std::span<const NutrientVector> items);

// JSON keys match the food database schema: energy_kcal, carbohydrate_g,
// fat_g, saturated_fat_g, protein_g, sodium_mg, sugars_g, fiber_g.
nlohmann::json to_json(const NutrientVector& v);
NutrientVector nutrient_vector_from_json(const nlohmann::json& j);

}  // namespace dietcha
