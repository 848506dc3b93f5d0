#include "dietcha/remote_nutrition.h"

#include <cstdlib>

#include <nlohmann/json.hpp>

namespace dietcha {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return (v && *v) ? std::string(v) : std::move(fallback);
}

std::string excerpt(std::string_view body) { return std::string(body.substr(0, 200)); }

[[noreturn]] void unparseable(const std::string& why, std::string_view body) {
    throw Error(ErrorCode::UnparseableResponse, "nutrition API response: " + why, {{"excerpt", excerpt(body)}});
}

double number_field(const nlohmann::json& food, const char* key, std::string_view body) {
    auto it = food.find(key);
    if (it == food.end() || !it->is_number()) unparseable(std::string("missing numeric field '") + key + "'", body);
    return it->get<double>();
}

}  // namespace

RemoteNutritionConfig RemoteNutritionConfig::from_environment() {
    RemoteNutritionConfig c;
    c.url = env_or("NUTRITION_API_URL", kDefaultUrl);
    c.app_id = env_or("NUTRITION_API_ID", "");
    c.app_key = env_or("NUTRITION_API_KEY", "");
    return c;
}

std::vector<ResolvedItem> parse_natural_nutrients_response(std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        unparseable("body is not JSON", body);
    }
    if (!j.is_object() || !j.contains("foods") || !j["foods"].is_array()) unparseable("no 'foods' array", body);

    std::vector<ResolvedItem> items;
    for (const auto& food : j["foods"]) {
        if (!food.is_object() || !food.contains("food_name") || !food["food_name"].is_string()) {
            unparseable("food entry without food_name", body);
        }
        const double mass = number_field(food, "serving_weight_grams", body);
        const double qty = food.contains("serving_qty") && food["serving_qty"].is_number()
                               ? food["serving_qty"].get<double>()
                               : 1.0;
        if (!(mass > 0.0) || !(qty > 0.0)) unparseable("non-positive serving size", body);

        ResolvedItem item;
        try {
            const NutrientVector per_serving(NutrientAmounts{
                number_field(food, "nf_calories", body),
                number_field(food, "nf_total_carbohydrate", body),
                number_field(food, "nf_total_fat", body),
                number_field(food, "nf_saturated_fat", body),
                number_field(food, "nf_protein", body),
                number_field(food, "nf_sodium", body),
                number_field(food, "nf_sugars", body),
                number_field(food, "nf_dietary_fiber", body),
            });
            auto record = std::make_shared<FoodRecord>();
            record->name = normalize_name(food["food_name"].get<std::string>());
            record->food_id = "remote:" + record->name;
            record->per_100g = per_serving.scaled(100.0 / mass);
            record->servings.push_back({Unit::CountServing, mass / qty});

            item.source.quantity = qty;
            item.source.unit = Unit::CountServing;
            if (food.contains("serving_unit") && food["serving_unit"].is_string()) {
                if (auto u = unit_from_alias(food["serving_unit"].get<std::string>())) item.source.unit = *u;
            }
            item.source.name = record->name;
            item.mass_g = mass;
            item.nutrients = record->per_100g.scaled(mass / 100.0);
            item.record = std::move(record);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::UnparseableResponse) throw;
            unparseable(std::string("invalid nutrient values: ") + e.what(), body);
        }
        items.push_back(std::move(item));
    }
    return items;
}

RemoteNutritionSource::RemoteNutritionSource(RemoteNutritionConfig config, std::shared_ptr<net::Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::vector<ResolvedItem> RemoteNutritionSource::remote_lookup(std::string_view text) const {
    if (!config_.has_credentials()) {
        throw Error(ErrorCode::AuthError, "nutrition API credentials are not configured",
                    {{"env", {"NUTRITION_API_ID", "NUTRITION_API_KEY"}}});
    }
    net::HttpRequest request;
    request.url = config_.url;
    request.body = nlohmann::json{{"query", std::string(text)}}.dump();
    request.headers = {{"Content-Type", "application/json"},
                       {"x-app-id", config_.app_id},
                       {"x-app-key", config_.app_key}};
    auto transport = transport_ ? transport_ : net::default_transport();
    const auto response = transport->post(request);
    if (response.status == 401 || response.status == 403) {
        throw Error(ErrorCode::AuthError, "nutrition API rejected the credentials",
                    {{"status", response.status}, {"excerpt", excerpt(response.body)}});
    }
    if (response.status < 200 || response.status >= 300) {
        throw Error(ErrorCode::NetworkError, "nutrition API returned HTTP " + std::to_string(response.status),
                    {{"status", response.status}, {"excerpt", excerpt(response.body)}});
    }
    return parse_natural_nutrients_response(response.body);
}

MealResolution RemoteNutritionSource::resolve_meal(std::string_view text) const {
    MealResolution out;
    out.items = remote_lookup(text);
    if (out.items.empty()) {
        throw Error(ErrorCode::MealUnresolvable, "the nutrition API matched no foods",
                    {{"failures", nlohmann::json::array()}});
    }
    std::vector<NutrientVector> parts;
    for (const auto& item : out.items) parts.push_back(item.nutrients);
    out.total = aggregate(parts);
    out.notes.push_back("resolved by the remote nutrition API; its first-ranked match was taken for each food phrase");
    return out;
}

bool RemoteNutritionSource::mentions_food(std::string_view text) const {
    try {
        return !parse_meal(text).empty();
    } catch (const Error&) {
        return false;
    }
}

}  // namespace dietcha
