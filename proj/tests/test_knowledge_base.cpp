#include <gtest/gtest.h>

#include <sstream>

#include "dietcha/error.h"
#include "dietcha/food_index.h"
#include "dietcha/knowledge_source.h"
#include "test_support.h"

using namespace dietcha;
using dietcha::testing::bundled_index;

namespace {

std::string record_line(const std::string& id, const std::string& name, const std::string& aliases = "[]") {
    return R"({"food_id": ")" + id + R"(", "name": ")" + name + R"(", "aliases": )" + aliases +
           R"(, "per_100g": {"energy_kcal": 100, "carbohydrate_g": 10, "fat_g": 2, "saturated_fat_g": 1, )"
           R"("protein_g": 5, "sodium_mg": 50, "sugars_g": 3, "fiber_g": 1}, "servings": [{"unit": "count", "grams_per_unit": 40}]})";
}

Error ingest_error(const std::string& text) {
    std::istringstream in(text);
    try {
        FoodIndex::ingest(in);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "ingest accepted: " << text;
    return Error(ErrorCode::CorpusSchema, "none");
}

}  // namespace

TEST(FoodIndex, BundledDatabase) {
    const auto& index = *bundled_index();
    EXPECT_EQ(index.size(), 78u);
    EXPECT_EQ(index.find("Whole-Wheat Toast")->food_id, "whole_wheat_toast");
    EXPECT_EQ(index.find("toast")->food_id, "whole_wheat_toast");
    EXPECT_EQ(index.find("eggs")->food_id, "boiled_egg");
    EXPECT_EQ(index.find("unobtainium"), nullptr);
    for (const auto& r : index.records()) EXPECT_NE(r->serving(Unit::CountServing), nullptr) << r->food_id;
}

TEST(FoodIndex, IngestErrorsCarryLineNumbers) {
    const auto bad = ingest_error(record_line("a", "apple") + "\n\n{\"food_id\": \"b\"}\n");
    EXPECT_EQ(bad.code(), ErrorCode::SchemaViolation);
    EXPECT_EQ(bad.details().at("line"), 3);

    const auto garbage = ingest_error(record_line("a", "apple") + "\nnot json\n");
    EXPECT_EQ(garbage.code(), ErrorCode::SchemaViolation);
    EXPECT_EQ(garbage.details().at("line"), 2);

    const auto dup = ingest_error(record_line("a", "apple") + "\n" + record_line("b", "pear", R"(["Apples"])") + "\n");
    EXPECT_EQ(dup.code(), ErrorCode::DuplicateAlias);
}

TEST(FoodIndex, EmptyAndSelfAlias) {
    std::istringstream empty("\n\n");
    EXPECT_TRUE(FoodIndex::ingest(empty).empty());
    std::istringstream self(record_line("a", "apple", R"(["Apples"])") + "\n");
    EXPECT_EQ(FoodIndex::ingest(self).size(), 1u);
}

TEST(FoodIndex, JsonlRoundTrip) {
    std::ostringstream out;
    bundled_index()->write_jsonl(out);
    std::istringstream in(out.str());
    EXPECT_EQ(FoodIndex::ingest(in), *bundled_index());
}

TEST(Lookup, SlicesOfToast) {
    const auto item = lookup({2, Unit::Slice, "whole wheat toast"}, *bundled_index());
    EXPECT_DOUBLE_EQ(item.mass_g, 56.0);
    EXPECT_NEAR(item.nutrients.carbohydrate_g(), 24.08, 1e-9);
    EXPECT_NEAR(item.nutrients.energy_kcal(), 141.12, 1e-9);
}

TEST(Lookup, UnitErrors) {
    try {
        lookup({1, Unit::Cup, "boiled egg"}, *bundled_index());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownUnit);
    }
    try {
        lookup({1, Unit::CountServing, "unobtainium"}, *bundled_index());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FoodNotFound);
    }
}

TEST(Lookup, HundredGramsIsIdentity) {
    for (const auto& r : bundled_index()->records()) {
        const auto item = lookup({100, Unit::G, r->name}, *bundled_index());
        EXPECT_EQ(item.nutrients, r->per_100g) << r->name;
    }
}

TEST(Lookup, LinearInQuantity) {
    const auto& index = *bundled_index();
    for (const auto& r : index.records()) {
        const auto one = lookup({1, Unit::CountServing, r->name}, index);
        const auto three = lookup({3, Unit::CountServing, r->name}, index);
        for (Nutrient n : kAllNutrients) {
            EXPECT_NEAR(three.nutrients.amount(n), 3 * one.nutrients.amount(n), 1e-9 * (1 + one.nutrients.amount(n)));
        }
        const auto oz = lookup({1, Unit::Oz, r->name}, index);
        EXPECT_DOUBLE_EQ(oz.mass_g, 28.3495);
    }
}

TEST(ResolveMeal, PartialResolutionWarns) {
    const auto m = resolve_meal("2 eggs and a plate of unobtainium, 1 cup rice", *bundled_index());
    ASSERT_EQ(m.items.size(), 2u);
    ASSERT_EQ(m.warnings.size(), 1u);
    EXPECT_EQ(m.warnings[0].code, ErrorCode::FoodNotFound);
    EXPECT_EQ(m.warnings[0].position, 1u);
    EXPECT_NEAR(m.total.energy_kcal(), m.items[0].nutrients.energy_kcal() + m.items[1].nutrients.energy_kcal(), 1e-9);
    EXPECT_EQ(to_json(m)["warnings"].size(), 1u);
}

TEST(ResolveMeal, NothingResolves) {
    try {
        resolve_meal("unobtainium and 2 cups of boiled egg", *bundled_index());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MealUnresolvable);
        EXPECT_EQ(e.details().at("failures").size(), 2u);
    }
    EXPECT_THROW(resolve_meal("", *bundled_index()), Error);
}

TEST(LocalKnowledgeBase, MentionsFood) {
    LocalKnowledgeBase kb(bundled_index());
    EXPECT_TRUE(kb.mentions_food("I had two eggs"));
    EXPECT_TRUE(kb.mentions_food("what about adding a candy bar?"));
    EXPECT_FALSE(kb.mentions_food("hello there"));
    EXPECT_FALSE(kb.mentions_food(""));
    EXPECT_EQ(kb.kind(), "local");
}
