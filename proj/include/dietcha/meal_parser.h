#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dietcha/units.h"

namespace dietcha {

/// One (quantity, unit, food) item from a meal description.
struct QuantifiedFood {
    double quantity = 1.0;
    Unit unit = Unit::CountServing;
    std::string name;

    friend bool operator==(const QuantifiedFood&, const QuantifiedFood&) = default;
};

enum class MealTokenKind { Word, Number, Fraction, Separator, SentenceEnd };

struct MealToken {
    std::string text;
    MealTokenKind kind = MealTokenKind::Word;
    double value = 0.0;  // Number and Fraction only
};

/// Lowercases and splits a meal description. "100g" splits into a number
/// and a unit word; "1/2" is one Fraction token; "&" becomes "and".
std::vector<MealToken> tokenize_meal(std::string_view text);

struct ParsedItem {
    QuantifiedFood food;
    bool has_quantity = false;
    bool has_unit = false;
    /// Inclusive token span in the tokenize_meal() output.
    std::size_t first_token = 0;
    std::size_t last_token = 0;
};

struct MealParse {
    std::vector<MealToken> tokens;
    std::vector<ParsedItem> items;
    /// Tokens attributed to no item: connectives, stop phrases ("for
    /// breakfast", "I had") and question sentences ("is that ok?").
    std::vector<std::size_t> ignored;
};

/// Grammar:
///
///     MEAL ::= ITEM (SEP ITEM)*       SEP ::= "," | ";" | "and" | "with" | "plus" | "." | "?" | "!"
///     ITEM ::= [QTY] [UNIT ["of"]] NAME
///     QTY  ::= 2 | 1.5 | 1/2 | 1 1/2 | one..twelve | a | an | half [a|an]
///
/// A missing QTY is 1 and a missing UNIT is CountServing. "of" is only
/// consumed right after a unit, so "cream of mushroom soup" keeps it.
///
/// Throws EmptyMeal for blank input or input with no meal content, and
/// MalformedItem (details.position = item index) for an item whose name is
/// empty or whose quantity is not positive.
MealParse parse_meal_detailed(std::string_view text);

std::vector<QuantifiedFood> parse_meal(std::string_view text);

/// Lowercase, strip punctuation (apostrophes vanish, everything else becomes
/// a space), collapse whitespace and fold a plural on the last word:
/// "Boiled  Eggs" -> "boiled egg". Idempotent. Throws MalformedItem when
/// nothing is left.
std::string normalize_name(std::string_view raw);

/// "," ";" "and" "with" "plus" and sentence punctuation.
bool is_connective(const MealToken& token);

}  // namespace dietcha
