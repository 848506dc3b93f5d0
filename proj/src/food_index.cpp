#include "dietcha/food_index.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "dietcha/error.h"
#include "dietcha/format.h"

namespace dietcha {

namespace {

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorCode::SchemaViolation, message); }

std::string required_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) schema(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::string normalized_or_schema(const std::string& raw, const char* what) {
    try {
        return normalize_name(raw);
    } catch (const Error&) {
        schema(std::string(what) + " '" + raw + "' is empty after normalization");
    }
}

}  // namespace

const Serving* FoodRecord::serving(Unit unit) const {
    for (const auto& s : servings) {
        if (s.unit == unit) return &s;
    }
    return nullptr;
}

FoodRecord food_record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) schema("record must be a JSON object");
    FoodRecord r;
    r.food_id = required_string(j, "food_id");
    if (r.food_id.empty()) schema("food_id must not be empty");
    r.name = normalized_or_schema(required_string(j, "name"), "name");

    if (auto it = j.find("aliases"); it != j.end()) {
        if (!it->is_array()) schema("aliases must be an array");
        for (const auto& a : *it) {
            if (!a.is_string()) schema("aliases must be strings");
            r.aliases.push_back(normalized_or_schema(a.get<std::string>(), "alias"));
        }
    }

    auto per = j.find("per_100g");
    if (per == j.end()) schema("missing per_100g");
    try {
        r.per_100g = nutrient_vector_from_json(*per);
    } catch (const Error& e) {
        schema(std::string("per_100g: ") + e.what());
    }

    auto servings = j.find("servings");
    if (servings == j.end() || !servings->is_array()) schema("servings must be an array");
    for (const auto& s : *servings) {
        if (!s.is_object()) schema("serving must be an object");
        const auto unit_name = required_string(s, "unit");
        auto unit = unit_from_string(unit_name);
        if (!unit) schema("unknown serving unit '" + unit_name + "'");
        if (grams_per_mass_unit(*unit)) schema("serving unit '" + unit_name + "' is a mass unit");
        auto g = s.find("grams_per_unit");
        if (g == s.end() || !g->is_number()) schema("serving needs numeric grams_per_unit");
        const double grams = g->get<double>();
        if (!std::isfinite(grams) || grams <= 0.0) schema("grams_per_unit must be positive");
        if (r.serving(*unit)) schema("duplicate serving unit '" + unit_name + "'");
        r.servings.push_back({*unit, grams});
    }
    if (!r.serving(Unit::CountServing)) schema("record '" + r.food_id + "' has no 'count' serving");
    return r;
}

nlohmann::json to_json(const FoodRecord& record) {
    nlohmann::json servings = nlohmann::json::array();
    for (const auto& s : record.servings) {
        servings.push_back({{"unit", std::string(to_string(s.unit))}, {"grams_per_unit", s.grams_per_unit}});
    }
    return {
        {"food_id", record.food_id},
        {"name", record.name},
        {"aliases", record.aliases},
        {"per_100g", to_json(record.per_100g)},
        {"servings", std::move(servings)},
    };
}

FoodIndex::FoodIndex(std::vector<FoodRecord> records) {
    std::unordered_map<std::string, std::size_t> ids;
    for (auto& rec : records) {
        const std::size_t slot = records_.size();
        if (!ids.emplace(rec.food_id, slot).second) {
            throw Error(ErrorCode::SchemaViolation, "duplicate food_id '" + rec.food_id + "'",
                        {{"food_id", rec.food_id}});
        }
        auto add_key = [&](const std::string& key) {
            // Repeats inside one record (an alias that normalizes to the name) are harmless.
            auto [it, inserted] = by_key_.emplace(key, slot);
            if (!inserted && it->second != slot) {
                throw Error(ErrorCode::DuplicateAlias, "name or alias '" + key + "' is used by two records",
                            {{"name", key}, {"food_id", rec.food_id}});
            }
        };
        add_key(rec.name);
        for (const auto& a : rec.aliases) add_key(a);
        records_.push_back(std::make_shared<const FoodRecord>(std::move(rec)));
    }
}

FoodIndex FoodIndex::ingest(std::istream& in) {
    std::vector<FoodRecord> records;
    std::unordered_map<std::string, std::size_t> line_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(food_record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": invalid JSON",
                        {{"line", line_no}, {"reason", e.what()}});
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": " + e.what(),
                        {{"line", line_no}});
        }
        line_of.emplace(records.back().food_id, line_no);
    }
    try {
        return FoodIndex(std::move(records));
    } catch (const Error& e) {
        // Point collisions at the line that introduced them.
        auto details = e.details();
        if (auto it = line_of.find(details.value("food_id", "")); it != line_of.end()) details["line"] = it->second;
        throw Error(e.code(), e.what(), std::move(details));
    }
}

FoodIndex FoodIndex::ingest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::SchemaViolation, "cannot open food database " + path.string(),
                    {{"path", path.string()}});
    }
    return ingest(in);
}

std::shared_ptr<const FoodRecord> FoodIndex::find(std::string_view name) const {
    std::string key;
    try {
        key = normalize_name(name);
    } catch (const Error&) {
        return nullptr;
    }
    auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : records_[it->second];
}

void FoodIndex::write_jsonl(std::ostream& out) const {
    for (const auto& r : records_) out << to_json(*r).dump() << '\n';
}

bool operator==(const FoodIndex& lhs, const FoodIndex& rhs) {
    if (lhs.records_.size() != rhs.records_.size() || lhs.by_key_ != rhs.by_key_) return false;
    for (std::size_t i = 0; i < lhs.records_.size(); ++i) {
        if (!(*lhs.records_[i] == *rhs.records_[i])) return false;
    }
    return true;
}

ResolvedItem lookup(const QuantifiedFood& item, const FoodIndex& index) {
    auto record = index.find(item.name);
    if (!record) {
        throw Error(ErrorCode::FoodNotFound, "no food named '" + item.name + "' in the database",
                    {{"name", item.name}});
    }
    double grams_per_unit = 0.0;
    if (auto mass = grams_per_mass_unit(item.unit)) {
        grams_per_unit = *mass;
    } else if (const auto* s = record->serving(item.unit)) {
        grams_per_unit = s->grams_per_unit;
    } else {
        throw Error(ErrorCode::UnknownUnit,
                    "'" + item.name + "' has no serving size for unit '" + std::string(to_string(item.unit)) + "'",
                    {{"name", item.name}, {"unit", std::string(to_string(item.unit))}});
    }
    ResolvedItem out;
    out.source = item;
    out.record = record;
    out.mass_g = item.quantity * grams_per_unit;
    out.nutrients = record->per_100g.scaled(out.mass_g / 100.0);
    return out;
}

nlohmann::json to_json(const ResolvedItem& item) {
    return {
        {"quantity", item.source.quantity},
        {"unit", std::string(to_string(item.source.unit))},
        {"name", item.source.name},
        {"food_id", item.record ? item.record->food_id : ""},
        {"food_name", item.record ? item.record->name : item.source.name},
        {"mass_g", item.mass_g},
        {"nutrients", to_json(item.nutrients)},
        {"display", {{"quantity", format_compact(item.source.quantity)}, {"mass_g", format_fixed(item.mass_g, 2)}}},
    };
}

}  // namespace dietcha
