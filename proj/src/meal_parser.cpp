#include "dietcha/meal_parser.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "dietcha/error.h"

namespace dietcha {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

std::optional<double> parse_decimal(std::string_view s) {
    // digits[.digits] or .digits
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) {
        if (!all_digits(s)) return std::nullopt;
    } else {
        const auto whole = s.substr(0, dot);
        const auto frac = s.substr(dot + 1);
        if (!(whole.empty() || all_digits(whole)) || !all_digits(frac)) return std::nullopt;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct VulgarFraction {
    std::string_view utf8;
    double value;
};

constexpr std::array<VulgarFraction, 8> kVulgar = {{
    {"\xC2\xBD", 0.5},
    {"\xC2\xBC", 0.25},
    {"\xC2\xBE", 0.75},
    {"\xE2\x85\x93", 1.0 / 3.0},
    {"\xE2\x85\x94", 2.0 / 3.0},
    {"\xE2\x85\x9B", 0.125},
    {"\xE2\x85\x95", 0.2},
    {"\xE2\x85\x99", 1.0 / 6.0},
}};

const VulgarFraction* vulgar_at(std::string_view text, std::size_t i) {
    for (const auto& v : kVulgar) {
        if (text.substr(i, v.utf8.size()) == v.utf8) return &v;
    }
    return nullptr;
}

MealToken classify_raw(std::string raw) {
    MealToken tok;
    tok.text = std::move(raw);
    if (auto v = parse_decimal(tok.text)) {
        tok.kind = MealTokenKind::Number;
        tok.value = *v;
        return tok;
    }
    const auto slash = tok.text.find('/');
    if (slash != std::string::npos) {
        const std::string_view sv(tok.text);
        const auto num = sv.substr(0, slash);
        const auto den = sv.substr(slash + 1);
        if (all_digits(num) && all_digits(den)) {
            tok.kind = MealTokenKind::Fraction;
            const double d = std::stod(std::string(den));
            // A zero denominator yields a non-positive quantity, reported by the parser.
            tok.value = d == 0.0 ? 0.0 : std::stod(std::string(num)) / d;
            return tok;
        }
    }
    tok.kind = MealTokenKind::Word;
    return tok;
}

void emit_word(std::string& current, std::vector<MealToken>& out) {
    if (current.empty()) return;
    // "100g" / "250ml": a number glued to a unit.
    std::size_t split = 0;
    while (split < current.size() && (is_digit(current[split]) || current[split] == '.')) ++split;
    if (split > 0 && split < current.size() && parse_decimal(std::string_view(current).substr(0, split)) &&
        unit_from_alias(std::string_view(current).substr(split))) {
        out.push_back(classify_raw(current.substr(0, split)));
        out.push_back(classify_raw(current.substr(split)));
    } else {
        out.push_back(classify_raw(current));
    }
    current.clear();
}

const std::array<std::pair<std::string_view, int>, 12> kNumberWords = {{
    {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4}, {"five", 5}, {"six", 6},
    {"seven", 7}, {"eight", 8}, {"nine", 9}, {"ten", 10}, {"eleven", 11}, {"twelve", 12},
}};

std::optional<double> number_word(std::string_view w) {
    for (const auto& [word, value] : kNumberWords) {
        if (word == w) return value;
    }
    return std::nullopt;
}

// Matched as whole-token sequences; the longest match wins at each position.
const std::vector<std::vector<std::string_view>>& stop_phrases() {
    static const std::vector<std::vector<std::string_view>> kPhrases = {
        {"i", "had"},           {"i", "have", "had"},     {"i", "ve", "had"},      {"i've", "had"},
        {"i", "ate"},           {"i", "have", "eaten"},   {"i've", "eaten"},       {"i", "also", "had"},
        {"i", "also", "ate"},   {"i", "drank"},           {"i", "also", "drank"},  {"i", "will", "have"},
        {"we", "had"},          {"today"},                {"yesterday"},           {"tonight"},
        {"this", "morning"},    {"this", "afternoon"},    {"this", "evening"},     {"for", "breakfast"},
        {"for", "lunch"},       {"for", "dinner"},        {"for", "supper"},       {"for", "dessert"},
        {"for", "brunch"},      {"for", "a", "snack"},    {"as", "a", "snack"},    {"at", "breakfast"},
        {"at", "lunch"},        {"at", "dinner"},         {"in", "the", "morning"}, {"in", "the", "evening"},
        {"breakfast", "was"},   {"lunch", "was"},         {"dinner", "was"},       {"my", "breakfast", "was"},
        {"my", "lunch", "was"}, {"my", "dinner", "was"},  {"then"},                {"also"},
        {"later"},              {"afterwards"},           {"what", "about", "adding"},
        {"how", "about", "adding"}, {"what", "if", "i", "add"}, {"what", "if", "i", "also", "had"},
        {"hi"},                 {"hello"},                {"hey"},                 {"please"},
        {"thanks"},             {"thank", "you"},         {"ok"},                  {"okay"},
    };
    return kPhrases;
}

// A sentence opening with one of these is a question or remark, not a meal.
const std::set<std::string_view> kQuestionOpeners = {
    "is", "are", "am", "was", "were", "does", "do", "did", "can", "could", "should", "would",
    "will", "how", "what", "why", "which", "when", "where", "who", "tell", "explain", "show",
};

const std::set<std::string_view> kMealLabels = {
    "breakfast", "lunch", "dinner", "supper", "snack", "snacks", "dessert", "brunch",
};

bool is_utf8_apostrophe(std::string_view s, std::size_t i) {
    return s.substr(i, 3) == "\xE2\x80\x99";
}

// Plural folding for the head noun. Every output is a fixed point.
std::string fold_plural(const std::string& w) {
    static const std::set<std::string_view> kInvariant = {
        "hummus", "couscous", "asparagus", "molasses", "swiss", "grits", "fries", "oats",
    };
    static const std::array<std::pair<std::string_view, std::string_view>, 6> kIrregular = {{
        {"cookies", "cookie"}, {"brownies", "brownie"}, {"smoothies", "smoothie"},
        {"veggies", "veggie"}, {"pies", "pie"}, {"calories", "calorie"},
    }};
    if (kInvariant.count(w)) return w;
    for (const auto& [from, to] : kIrregular) {
        if (w == from) return std::string(to);
    }
    auto ends_with = [&](std::string_view suffix) {
        return w.size() >= suffix.size() && std::string_view(w).substr(w.size() - suffix.size()) == suffix;
    };
    if (ends_with("ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    for (std::string_view suffix : {"oes", "ches", "shes", "xes", "zes", "sses"}) {
        if (ends_with(suffix)) return w.substr(0, w.size() - 2);
    }
    if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
        return w.substr(0, w.size() - 1);
    }
    return w;
}

std::string join_texts(const std::vector<MealToken>& tokens, const std::vector<std::size_t>& idx,
                       std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t k = from; k < to; ++k) {
        if (!out.empty()) out += ' ';
        out += tokens[idx[k]].text;
    }
    return out;
}

[[noreturn]] void malformed(std::size_t position, const std::string& text, const std::string& why) {
    throw Error(ErrorCode::MalformedItem, "item " + std::to_string(position) + " (\"" + text + "\") " + why,
                {{"position", position}, {"text", text}});
}

}  // namespace

bool is_connective(const MealToken& token) {
    if (token.kind == MealTokenKind::Separator || token.kind == MealTokenKind::SentenceEnd) return true;
    return token.kind == MealTokenKind::Word &&
           (token.text == "and" || token.text == "with" || token.text == "plus");
}

std::vector<MealToken> tokenize_meal(std::string_view text) {
    std::vector<MealToken> out;
    std::string current;
    auto push_punct = [&](std::string text, MealTokenKind kind) {
        emit_word(current, out);
        out.push_back(MealToken{std::move(text), kind, 0.0});
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const auto uc = static_cast<unsigned char>(c);
        if (uc >= 0x80) {
            if (const auto* v = vulgar_at(text, i)) {
                emit_word(current, out);
                out.push_back(MealToken{std::string(v->utf8), MealTokenKind::Fraction, v->value});
                i += v->utf8.size() - 1;
                continue;
            }
            current += c;
            continue;
        }
        if (std::isspace(uc)) {
            emit_word(current, out);
        } else if (c == ',' || c == ';' || c == ':') {
            push_punct(std::string(1, c), MealTokenKind::Separator);
        } else if (c == '.') {
            const bool next_digit = i + 1 < text.size() && is_digit(text[i + 1]);
            const bool in_number = current.empty() || all_digits(current);
            if (next_digit && in_number) {
                current += c;
            } else {
                push_punct(".", MealTokenKind::SentenceEnd);
            }
        } else if (c == '?' || c == '!') {
            push_punct(std::string(1, c), MealTokenKind::SentenceEnd);
        } else if (c == '&') {
            emit_word(current, out);
            out.push_back(MealToken{"and", MealTokenKind::Word, 0.0});
        } else if (c == '/') {
            const bool next_digit = i + 1 < text.size() && is_digit(text[i + 1]);
            if (next_digit && all_digits(current)) {
                current += c;
            } else {
                emit_word(current, out);
            }
        } else if (std::isalnum(uc) || c == '\'' || c == '-') {
            current += static_cast<char>(std::tolower(uc));
        } else {
            emit_word(current, out);
        }
    }
    emit_word(current, out);
    return out;
}

std::string normalize_name(std::string_view raw) {
    std::string cleaned;
    cleaned.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto uc = static_cast<unsigned char>(raw[i]);
        if (raw[i] == '\'') continue;
        if (is_utf8_apostrophe(raw, i)) {
            i += 2;
            continue;
        }
        if (uc >= 0x80 || std::isalnum(uc)) {
            cleaned += static_cast<char>(uc < 0x80 ? std::tolower(uc) : uc);
        } else {
            cleaned += ' ';
        }
    }

    std::vector<std::string> words;
    std::string word;
    for (char c : cleaned) {
        if (c == ' ') {
            if (!word.empty()) words.push_back(std::move(word));
            word.clear();
        } else {
            word += c;
        }
    }
    if (!word.empty()) words.push_back(std::move(word));

    while (!words.empty()) {
        words.back() = fold_plural(words.back());
        if (!words.back().empty()) break;
        words.pop_back();
    }
    if (words.empty()) {
        throw Error(ErrorCode::MalformedItem, "food name is empty after normalization",
                    {{"text", std::string(raw)}});
    }

    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

MealParse parse_meal_detailed(std::string_view text) {
    if (std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
        throw Error(ErrorCode::EmptyMeal, "meal description is empty");
    }

    MealParse result;
    result.tokens = tokenize_meal(text);
    const auto& tokens = result.tokens;
    std::vector<bool> ignored(tokens.size(), false);

    // Stop phrases, longest match first.
    for (std::size_t i = 0; i < tokens.size();) {
        std::size_t best = 0;
        for (const auto& phrase : stop_phrases()) {
            if (phrase.size() <= best || i + phrase.size() > tokens.size()) continue;
            bool match = true;
            for (std::size_t k = 0; k < phrase.size() && match; ++k) {
                match = tokens[i + k].kind == MealTokenKind::Word && tokens[i + k].text == phrase[k];
            }
            if (match) best = phrase.size();
        }
        if (best == 0) {
            ++i;
            continue;
        }
        for (std::size_t k = 0; k < best; ++k) ignored[i + k] = true;
        i += best;
    }

    // Question sentences.
    for (std::size_t start = 0; start < tokens.size();) {
        std::size_t end = start;
        while (end < tokens.size() && tokens[end].kind != MealTokenKind::SentenceEnd) ++end;
        std::size_t first = start;
        while (first < end && (ignored[first] || is_connective(tokens[first]))) ++first;
        if (first < end && tokens[first].kind == MealTokenKind::Word && kQuestionOpeners.count(tokens[first].text)) {
            for (std::size_t k = start; k < end; ++k) ignored[k] = true;
        }
        start = end + 1;
    }

    // Split into segments on connectives.
    std::vector<std::vector<std::size_t>> segments(1);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (is_connective(tokens[i])) {
            ignored[i] = true;
            if (!segments.back().empty()) segments.emplace_back();
            continue;
        }
        if (ignored[i]) continue;
        segments.back().push_back(i);
    }
    if (segments.back().empty()) segments.pop_back();

    std::size_t position = 0;
    for (const auto& seg : segments) {
        if (seg.size() == 1 && tokens[seg[0]].kind == MealTokenKind::Word && kMealLabels.count(tokens[seg[0]].text)) {
            ignored[seg[0]] = true;
            continue;
        }
        ParsedItem item;
        item.first_token = seg.front();
        item.last_token = seg.back();
        std::size_t k = 0;
        const auto at = [&](std::size_t j) -> const MealToken& { return tokens[seg[j]]; };
        const auto word_at = [&](std::size_t j, std::string_view w) {
            return j < seg.size() && at(j).kind == MealTokenKind::Word && at(j).text == w;
        };

        if (at(0).kind == MealTokenKind::Number) {
            item.food.quantity = at(0).value;
            k = 1;
            const bool whole = all_digits(at(0).text);
            if (whole && k < seg.size() && at(k).kind == MealTokenKind::Fraction) {
                item.food.quantity += at(k).value;
                ++k;
            }
            item.has_quantity = true;
        } else if (at(0).kind == MealTokenKind::Fraction) {
            item.food.quantity = at(0).value;
            k = 1;
            item.has_quantity = true;
        } else if (auto n = number_word(at(0).text)) {
            item.food.quantity = *n;
            k = 1;
            item.has_quantity = true;
        } else if (word_at(0, "half")) {
            item.food.quantity = 0.5;
            k = (word_at(1, "a") || word_at(1, "an")) ? 2 : 1;
            item.has_quantity = true;
        } else if (word_at(0, "a") || word_at(0, "an")) {
            item.food.quantity = 1.0;
            k = 1;
            if (word_at(1, "half")) {
                item.food.quantity = 0.5;
                k = 2;
            }
            item.has_quantity = true;
        }

        if (k < seg.size() && at(k).kind == MealTokenKind::Word) {
            if (auto unit = unit_from_alias(at(k).text)) {
                item.food.unit = *unit;
                item.has_unit = true;
                ++k;
                if (word_at(k, "of")) ++k;
            }
        }

        const std::string segment_text = join_texts(tokens, seg, 0, seg.size());
        if (!(item.food.quantity > 0.0)) malformed(position, segment_text, "has a non-positive quantity");
        const std::string raw_name = join_texts(tokens, seg, k, seg.size());
        if (raw_name.empty()) malformed(position, segment_text, "has no food name");
        try {
            item.food.name = normalize_name(raw_name);
        } catch (const Error&) {
            malformed(position, segment_text, "has no food name");
        }
        result.items.push_back(std::move(item));
        ++position;
    }

    if (result.items.empty()) throw Error(ErrorCode::EmptyMeal, "no food items found in the description");
    for (std::size_t i = 0; i < ignored.size(); ++i) {
        if (ignored[i]) result.ignored.push_back(i);
    }
    return result;
}

std::vector<QuantifiedFood> parse_meal(std::string_view text) {
    auto parsed = parse_meal_detailed(text);
    std::vector<QuantifiedFood> out;
    out.reserve(parsed.items.size());
    for (auto& item : parsed.items) out.push_back(std::move(item.food));
    return out;
}

}  // namespace dietcha
