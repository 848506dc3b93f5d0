#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dietcha/error.h"
#include "dietcha/meal_parser.h"
#include "dietcha/units.h"
#include "parser_cases.h"

using namespace dietcha;

namespace {

std::string describe(const std::vector<QuantifiedFood>& items) {
    std::string out;
    for (const auto& i : items) {
        out += "(" + std::to_string(i.quantity) + ", " + std::string(to_string(i.unit)) + ", " + i.name + ") ";
    }
    return out;
}

ErrorCode parse_error(std::string_view text) {
    try {
        parse_meal(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::CorpusSchema;
}

}  // namespace

TEST(MealParser, GrammarTable) {
    for (const auto& c : dietcha::testing::parser_cases()) {
        EXPECT_EQ(parse_meal(c.text), c.expected) << c.text << "\n  got " << describe(parse_meal(c.text));
    }
}

TEST(MealParser, TableCoversEveryUnitAndConnective) {
    std::set<Unit> units;
    std::set<std::string> connectives;
    for (const auto& c : dietcha::testing::parser_cases()) {
        for (const auto& f : c.expected) units.insert(f.unit);
        for (const auto& t : tokenize_meal(c.text)) {
            if (is_connective(t)) connectives.insert(t.text);
        }
    }
    EXPECT_EQ(units.size(), 16u);  // 15 canonical units plus CountServing
    for (const char* s : {",", ";", "and", "with", "plus"}) EXPECT_TRUE(connectives.count(s)) << s;
}

TEST(MealParser, Errors) {
    EXPECT_EQ(parse_error(""), ErrorCode::EmptyMeal);
    EXPECT_EQ(parse_error("   \t "), ErrorCode::EmptyMeal);
    EXPECT_EQ(parse_error("2 cups"), ErrorCode::MalformedItem);
    EXPECT_EQ(parse_error("0 eggs"), ErrorCode::MalformedItem);
    try {
        parse_meal("rice and 2 cups of");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedItem);
        EXPECT_EQ(e.details().at("position"), 1);
    }
}

TEST(MealParser, OfOnlyAfterUnit) {
    EXPECT_EQ(parse_meal("cream of mushroom soup"),
              (std::vector<QuantifiedFood>{{1, Unit::CountServing, "cream of mushroom soup"}}));
    EXPECT_EQ(parse_meal("2 cups of cream of mushroom soup"),
              (std::vector<QuantifiedFood>{{2, Unit::Cup, "cream of mushroom soup"}}));
}

TEST(MealParser, LargeSpelledNumbersAreNames) {
    EXPECT_EQ(parse_meal("thirteen almonds"),
              (std::vector<QuantifiedFood>{{1, Unit::CountServing, "thirteen almond"}}));
}

TEST(MealParser, TokenCoverage) {
    // Every token is either ignored or inside exactly one item span.
    for (const auto& c : dietcha::testing::parser_cases()) {
        const auto parse = parse_meal_detailed(c.text);
        std::vector<int> owners(parse.tokens.size(), 0);
        for (const auto& item : parse.items) {
            for (std::size_t i = item.first_token; i <= item.last_token; ++i) ++owners[i];
        }
        for (auto i : parse.ignored) ++owners[i];
        for (std::size_t i = 0; i < owners.size(); ++i) {
            EXPECT_EQ(owners[i], 1) << c.text << " token '" << parse.tokens[i].text << "'";
        }
        for (const auto& item : parse.items) {
            for (std::size_t i = item.first_token; i <= item.last_token; ++i) {
                EXPECT_FALSE(is_connective(parse.tokens[i])) << c.text;
            }
        }
    }
}

TEST(MealParser, Deterministic) {
    for (const auto& c : dietcha::testing::parser_cases()) EXPECT_EQ(parse_meal(c.text), parse_meal(c.text));
}

TEST(NormalizeName, Examples) {
    EXPECT_EQ(normalize_name("Boiled  Eggs"), "boiled egg");
    EXPECT_EQ(normalize_name("whole-wheat toast"), "whole wheat toast");
    EXPECT_EQ(normalize_name("Kellogg's Corn Flakes"), "kelloggs corn flake");
    EXPECT_EQ(normalize_name("berries"), "berry");
    EXPECT_EQ(normalize_name("tomatoes"), "tomato");
    EXPECT_EQ(normalize_name("sandwiches"), "sandwich");
    EXPECT_EQ(normalize_name("hummus"), "hummus");
    EXPECT_EQ(normalize_name("glass"), "glass");
    EXPECT_EQ(normalize_name("cookies"), "cookie");
    EXPECT_THROW(normalize_name("s"), Error);
    EXPECT_THROW(normalize_name("  --  "), Error);
}

TEST(NormalizeName, IdempotentOnRandomStrings) {
    std::mt19937_64 rng(11);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ  -'.,sse";
    std::uniform_int_distribution<std::size_t> len(1, 24);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (std::size_t n = len(rng); n > 0; --n) s += alphabet[pick(rng)];
        try {
            const auto once = normalize_name(s);
            EXPECT_EQ(normalize_name(once), once) << "'" << s << "'";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::MalformedItem);
        }
    }
}

TEST(Units, AliasesAreInjective) {
    std::map<std::string, Unit> seen;
    for (const auto& [alias, unit] : unit_aliases()) {
        auto [it, inserted] = seen.emplace(std::string(alias), unit);
        EXPECT_TRUE(inserted || it->second == unit) << alias;
    }
    EXPECT_EQ(unit_from_alias("Cups"), Unit::Cup);
    EXPECT_EQ(unit_from_alias("tablespoons"), Unit::Tbsp);
    EXPECT_EQ(grams_per_mass_unit(Unit::Oz), 28.3495);
    EXPECT_EQ(grams_per_mass_unit(Unit::Lb), 453.592);
    EXPECT_EQ(grams_per_mass_unit(Unit::Kg), 1000.0);
    EXPECT_EQ(grams_per_mass_unit(Unit::Mg), 0.001);
    EXPECT_FALSE(grams_per_mass_unit(Unit::Cup).has_value());
}
