#include <gtest/gtest.h>

#include <memory>

#include "dietcha/error.h"
#include "dietcha/remote_nutrition.h"
#include "test_support.h"

using namespace dietcha;
using dietcha::testing::FakeTransport;
using dietcha::testing::SentinelTransport;

namespace {

RemoteNutritionConfig creds() {
    RemoteNutritionConfig c;
    c.app_id = "id";
    c.app_key = "key";
    return c;
}

const char* kToastBody = R"({"foods": [{"food_name": "Toast", "serving_qty": 2, "serving_unit": "slice",
    "serving_weight_grams": 56, "nf_calories": 141.12, "nf_total_carbohydrate": 24.08, "nf_total_fat": 1.96,
    "nf_saturated_fat": 0.392, "nf_protein": 7, "nf_sodium": 252, "nf_sugars": 2.464, "nf_dietary_fiber": 3.36}]})";

}  // namespace

TEST(RemoteNutrition, MissingCredentialsFailBeforeIo) {
    auto sentinel = std::make_shared<SentinelTransport>();
    RemoteNutritionSource source(RemoteNutritionConfig{}, sentinel);
    try {
        source.remote_lookup("2 eggs");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AuthError);
    }
    EXPECT_EQ(sentinel->calls, 0);
}

TEST(RemoteNutrition, RejectedCredentials) {
    auto fake = std::make_shared<FakeTransport>(net::HttpResponse{401, R"({"message":"unauthorized"})"});
    RemoteNutritionSource source(creds(), fake);
    try {
        source.remote_lookup("2 eggs");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AuthError);
        EXPECT_EQ(e.details().at("status"), 401);
    }
}

TEST(RemoteNutrition, ServerErrorIsNetworkError) {
    auto fake = std::make_shared<FakeTransport>(net::HttpResponse{502, "bad gateway"});
    RemoteNutritionSource source(creds(), fake);
    try {
        source.remote_lookup("2 eggs");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NetworkError);
    }
}

TEST(RemoteNutrition, MalformedBodyKeepsExcerpt) {
    const std::string body = "<html>" + std::string(500, 'x');
    try {
        parse_natural_nutrients_response(body);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnparseableResponse);
        const auto excerpt = e.details().at("excerpt").get<std::string>();
        EXPECT_EQ(excerpt.substr(0, 6), "<html>");
        EXPECT_LE(excerpt.size(), 200u);
    }
    EXPECT_THROW(parse_natural_nutrients_response(R"({"foods": [{"food_name": "x"}]})"), Error);
    EXPECT_THROW(parse_natural_nutrients_response(R"({"items": []})"), Error);
}

TEST(RemoteNutrition, MapsResponseOntoItems) {
    auto fake = std::make_shared<FakeTransport>(net::HttpResponse{200, kToastBody});
    RemoteNutritionSource source(creds(), fake);
    const auto m = source.resolve_meal("2 slices of toast");
    ASSERT_EQ(m.items.size(), 1u);
    EXPECT_EQ(m.items[0].source.name, "toast");
    EXPECT_EQ(m.items[0].source.unit, Unit::Slice);
    EXPECT_DOUBLE_EQ(m.items[0].source.quantity, 2.0);
    EXPECT_DOUBLE_EQ(m.items[0].mass_g, 56.0);
    EXPECT_NEAR(m.total.carbohydrate_g(), 24.08, 1e-9);
    EXPECT_NEAR(m.total.energy_kcal(), 141.12, 1e-9);
    EXPECT_NEAR(m.items[0].record->per_100g.carbohydrate_g(), 43.0, 1e-9);
    EXPECT_FALSE(m.notes.empty());

    ASSERT_EQ(fake->requests.size(), 1u);
    const auto& req = fake->requests[0];
    EXPECT_EQ(req.url, RemoteNutritionConfig::kDefaultUrl);
    EXPECT_EQ(nlohmann::json::parse(req.body), (nlohmann::json{{"query", "2 slices of toast"}}));
    bool has_id = false, has_key = false;
    for (const auto& [k, v] : req.headers) {
        has_id |= k == "x-app-id" && v == "id";
        has_key |= k == "x-app-key" && v == "key";
    }
    EXPECT_TRUE(has_id && has_key);
}

TEST(RemoteNutrition, EmptyMatchIsUnresolvable) {
    auto fake = std::make_shared<FakeTransport>(net::HttpResponse{200, R"({"foods": []})"});
    RemoteNutritionSource source(creds(), fake);
    try {
        source.resolve_meal("qwerty");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MealUnresolvable);
    }
}

TEST(HttpTransport, SplitUrl) {
    const auto u = net::split_url("https://trackapi.nutritionix.com/v2/natural/nutrients");
    EXPECT_EQ(u.path, "/v2/natural/nutrients");
    EXPECT_NE(u.scheme_host_port.find("trackapi.nutritionix.com"), std::string::npos);
    EXPECT_THROW(net::split_url("ftp://x"), Error);
}
