#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dietcha/http_transport.h"
#include "dietcha/knowledge_source.h"

namespace dietcha {

/// Connection settings for a Nutritionix-style natural-language nutrients
/// endpoint.
struct RemoteNutritionConfig {
    static constexpr const char* kDefaultUrl = "https://trackapi.nutritionix.com/v2/natural/nutrients";

    std::string url = kDefaultUrl;
    std::string app_id;
    std::string app_key;

    /// NUTRITION_API_URL (optional), NUTRITION_API_ID, NUTRITION_API_KEY.
    static RemoteNutritionConfig from_environment();
    bool has_credentials() const { return !app_id.empty() && !app_key.empty(); }
};

/// Maps a natural-nutrients response body onto resolved items. Each entry of
/// "foods" becomes one item whose mass is serving_weight_grams.
/// Throws UnparseableResponse (details.excerpt holds the start of the body).
std::vector<ResolvedItem> parse_natural_nutrients_response(std::string_view body);

/// Knowledge source that forwards the raw meal text to the remote API.
/// It never touches the local parser's lookup path.
class RemoteNutritionSource final : public KnowledgeSource {
public:
    explicit RemoteNutritionSource(RemoteNutritionConfig config, std::shared_ptr<net::Transport> transport = nullptr);

    /// POST {"query": text}. Throws AuthError (missing credentials, checked
    /// before any I/O, or a 401/403), NetworkError, UnparseableResponse.
    std::vector<ResolvedItem> remote_lookup(std::string_view text) const;

    MealResolution resolve_meal(std::string_view text) const override;
    bool mentions_food(std::string_view text) const override;
    std::string_view kind() const override { return "remote"; }

private:
    RemoteNutritionConfig config_;
    std::shared_ptr<net::Transport> transport_;
};

}  // namespace dietcha
