#include "dietcha/eval.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "dietcha/error.h"
#include "dietcha/format.h"
#include "dietcha/meal_parser.h"
#include "dietcha/units.h"

namespace dietcha {

namespace {

[[noreturn]] void corpus_error(const std::string& msg, std::size_t line) {
    throw Error(ErrorCode::CorpusSchema, "corpus line " + std::to_string(line) + ": " + msg, {{"line", line}});
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n*-");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n*.");
    return s.substr(b, e - b + 1);
}

LabelRow labels_from_report_json(const nlohmann::json& report) {
    LabelRow row{};
    const auto& labels = report.at("labels");
    for (Nutrient n : kAllNutrients) {
        auto label = risk_label_from_string(labels.at(std::string(to_string(n))).get<std::string>());
        if (!label) throw Error(ErrorCode::UnparseableResponse, "unknown label in risk report");
        row[index_of(n)] = *label;
    }
    return row;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

}  // namespace

std::string_view short_label(RiskLabel label) {
    switch (label) {
        case RiskLabel::Risky: return "R";
        case RiskLabel::NotRisky: return "NR";
        case RiskLabel::Indeterminate: return "I";
    }
    return "I";
}

nlohmann::json to_json(const EvalQuestion& q) {
    nlohmann::json truth = nlohmann::json::object();
    for (Nutrient n : kAllNutrients) {
        truth[std::string(to_string(n))] = std::string(short_label(q.ground_truth[index_of(n)]));
    }
    return {{"id", q.id}, {"question", q.question}, {"ground_truth", std::move(truth)}};
}

EvalQuestion eval_question_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& msg) -> void { throw Error(ErrorCode::CorpusSchema, msg); };
    if (!j.is_object()) fail("row must be a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) fail("missing string field 'id'");
    if (!j.contains("question") || !j["question"].is_string()) fail("missing string field 'question'");
    if (!j.contains("ground_truth") || !j["ground_truth"].is_object()) fail("missing object field 'ground_truth'");
    EvalQuestion q;
    q.id = j["id"].get<std::string>();
    q.question = j["question"].get<std::string>();
    const auto& truth = j["ground_truth"];
    if (truth.size() != kNutrientCount) fail("ground_truth must have exactly 7 labels");
    for (Nutrient n : kAllNutrients) {
        auto it = truth.find(std::string(to_string(n)));
        if (it == truth.end() || !it->is_string()) fail("ground_truth is missing '" + std::string(to_string(n)) + "'");
        const auto v = it->get<std::string>();
        if (v == "R") {
            q.ground_truth[index_of(n)] = RiskLabel::Risky;
        } else if (v == "NR") {
            q.ground_truth[index_of(n)] = RiskLabel::NotRisky;
        } else {
            fail("ground_truth labels must be \"R\" or \"NR\"");
        }
    }
    return q;
}

std::vector<EvalQuestion> load_corpus(std::istream& in) {
    std::vector<EvalQuestion> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            corpus_error("not valid JSON", number);
        }
        try {
            out.push_back(eval_question_from_json(j));
        } catch (const Error& e) {
            corpus_error(e.what(), number);
        }
    }
    return out;
}

std::vector<EvalQuestion> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::CorpusSchema, "cannot open corpus " + path.string(), {{"path", path.string()}});
    return load_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<EvalQuestion>& corpus) {
    for (const auto& q : corpus) out << to_json(q).dump() << "\n";
}

InProcessTarget::InProcessTarget(std::shared_ptr<const Agent> agent) : agent_(std::move(agent)) {}

LabelRow InProcessTarget::ask(const std::string& question) {
    Session session("eval");
    const auto result = agent_->run_turn(session, question);
    if (!result.response.risk_report) throw Error(ErrorCode::MealUnresolvable, "reply carried no risk report");
    LabelRow row{};
    for (Nutrient n : kAllNutrients) row[index_of(n)] = result.response.risk_report->label(n);
    return row;
}

GatewayTarget::GatewayTarget(std::string base_url, std::shared_ptr<net::Transport> transport)
    : base_url_(std::move(base_url)), transport_(transport ? std::move(transport) : net::default_transport()) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

LabelRow GatewayTarget::ask(const std::string& question) {
    const std::vector<std::pair<std::string, std::string>> headers = {{"Content-Type", "application/json"}};
    const auto created = transport_->post({base_url_ + "/v1/sessions", "{}", headers});
    if (created.status != 201) {
        throw Error(ErrorCode::NetworkError, "session creation failed", {{"status", created.status}});
    }
    const auto id = nlohmann::json::parse(created.body).at("session_id").get<std::string>();
    const auto reply = transport_->post(
        {base_url_ + "/v1/sessions/" + id + "/messages", nlohmann::json{{"text", question}}.dump(), headers});
    if (reply.status != 200) {
        throw Error(ErrorCode::NetworkError, "message failed", {{"status", reply.status}, {"body", reply.body}});
    }
    const auto body = nlohmann::json::parse(reply.body);
    if (!body.contains("risk_report")) throw Error(ErrorCode::MealUnresolvable, "reply carried no risk report");
    return labels_from_report_json(body.at("risk_report"));
}

std::string render_baseline_prompt(const std::string& question) {
    std::ostringstream out;
    out << "A person with diabetes describes what they ate in one day:\n\n"
        << question
        << "\n\nEstimate the day's total intake of carbohydrate, fat, saturated fat, protein, sodium, sugars and "
           "dietary fiber. Compare them with these guidelines: carbohydrate below 45% of energy; fat 20 to 35% of "
           "energy; saturated fat below 10% of energy; protein 15 to 20% of energy; sodium at most 2300 mg; sugars "
           "at most 25 g; dietary fiber 20 to 35 g. A nutrient outside its range is Risky, otherwise Not Risky.\n"
           "End your answer with exactly seven lines in this form:\n";
    for (Nutrient n : kAllNutrients) out << display_name(n) << ": Risky or Not Risky\n";
    return out.str();
}

LabelRow parse_baseline_reply(const std::string& reply) {
    std::array<std::optional<RiskLabel>, kNutrientCount> found{};
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const auto name = lowercase(trim(line.substr(0, colon)));
        const auto value = lowercase(line.substr(colon + 1));
        for (Nutrient n : kAllNutrients) {
            if (name != lowercase(std::string(display_name(n))) && name != to_string(n)) continue;
            if (value.find("not risky") != std::string::npos) {
                found[index_of(n)] = RiskLabel::NotRisky;
            } else if (value.find("risky") != std::string::npos) {
                found[index_of(n)] = RiskLabel::Risky;
            }
        }
    }
    LabelRow row{};
    for (std::size_t i = 0; i < kNutrientCount; ++i) {
        if (!found[i]) {
            throw Error(ErrorCode::UnparseableResponse,
                        "baseline reply has no label for " + std::string(display_name(kAllNutrients[i])),
                        {{"excerpt", reply.substr(0, 200)}});
        }
        row[i] = *found[i];
    }
    return row;
}

ChatBaselineTarget::ChatBaselineTarget(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {}

LabelRow ChatBaselineTarget::ask(const std::string& question) {
    const auto reply =
        backend_->complete({config_.model, {{"user", render_baseline_prompt(question)}}, config_.temperature});
    return parse_baseline_reply(reply);
}

EvalReport run_eval(const std::vector<EvalQuestion>& corpus, EvalTarget& target, std::string system, unsigned jobs) {
    EvalReport report;
    report.system = std::move(system);
    report.questions = corpus.size();
    report.rows.resize(corpus.size());

    auto answer = [&](std::size_t i) {
        EvalRow& row = report.rows[i];
        row.id = corpus[i].id;
        try {
            row.predicted = target.ask(corpus[i].question);
            for (std::size_t c = 0; c < kNutrientCount; ++c) {
                row.match[c] = (*row.predicted)[c] == corpus[i].ground_truth[c];
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < corpus.size(); ++i) answer(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < corpus.size(); i = next++) answer(i);
            });
        }
        for (auto& t : workers) t.join();
    }

    std::array<std::size_t, kNutrientCount> matches{};
    for (const auto& row : report.rows) {
        if (row.error) ++report.errors;
        if (row.predicted) {
            report.indeterminate += static_cast<std::size_t>(
                std::count(row.predicted->begin(), row.predicted->end(), RiskLabel::Indeterminate));
        }
        for (std::size_t c = 0; c < kNutrientCount; ++c) matches[c] += row.match[c] ? 1 : 0;
    }
    for (std::size_t c = 0; c < kNutrientCount; ++c) {
        report.accuracy[c] =
            corpus.empty() ? 0.0 : 100.0 * static_cast<double>(matches[c]) / static_cast<double>(corpus.size());
    }
    return report;
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "table") return ReportFormat::Table;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    return std::nullopt;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json accuracy = nlohmann::json::object();
    for (Nutrient n : kAllNutrients) accuracy[std::string(to_string(n))] = report.accuracy[index_of(n)];
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json match = nlohmann::json::object();
        nlohmann::json predicted = nullptr;
        if (r.predicted) predicted = nlohmann::json::object();
        for (Nutrient n : kAllNutrients) {
            match[std::string(to_string(n))] = r.match[index_of(n)];
            if (r.predicted) predicted[std::string(to_string(n))] = std::string(to_string((*r.predicted)[index_of(n)]));
        }
        rows.push_back({{"id", r.id},
                        {"match", std::move(match)},
                        {"predicted", std::move(predicted)},
                        {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)}});
    }
    return {{"system", report.system},       {"questions", report.questions},
            {"accuracy", std::move(accuracy)}, {"rows", std::move(rows)},
            {"indeterminate", report.indeterminate}, {"errors", report.errors}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.system = j.at("system").get<std::string>();
    report.questions = j.at("questions").get<std::size_t>();
    report.indeterminate = j.at("indeterminate").get<std::size_t>();
    report.errors = j.at("errors").get<std::size_t>();
    for (Nutrient n : kAllNutrients) {
        report.accuracy[index_of(n)] = j.at("accuracy").at(std::string(to_string(n))).get<double>();
    }
    for (const auto& r : j.at("rows")) {
        EvalRow row;
        row.id = r.at("id").get<std::string>();
        if (!r.at("error").is_null()) row.error = r.at("error").get<std::string>();
        const auto& predicted = r.at("predicted");
        if (!predicted.is_null()) row.predicted = LabelRow{};
        for (Nutrient n : kAllNutrients) {
            const auto key = std::string(to_string(n));
            row.match[index_of(n)] = r.at("match").at(key).get<bool>();
            if (row.predicted) {
                auto label = risk_label_from_string(predicted.at(key).get<std::string>());
                if (!label) throw Error(ErrorCode::SchemaViolation, "unknown label in report");
                (*row.predicted)[index_of(n)] = *label;
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : reports) out.push_back(to_json(r));
        return out.dump(2) + "\n";
    }
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "system";
        for (Nutrient n : kAllNutrients) out << "," << to_string(n);
        out << "\n";
        for (const auto& r : reports) {
            out << r.system;
            for (double a : r.accuracy) out << "," << format_fixed(a, 0);
            out << "\n";
        }
        return out.str();
    }

    std::size_t first = std::string("System").size();
    for (const auto& r : reports) first = std::max(first, r.system.size());
    out << pad("System", first, false);
    for (Nutrient n : kAllNutrients) out << "  " << display_name(n);
    out << "\n";
    for (const auto& r : reports) {
        out << pad(r.system, first, false);
        for (Nutrient n : kAllNutrients) {
            out << "  " << pad(format_fixed(r.accuracy[index_of(n)], 0) + "%", display_name(n).size(), true);
        }
        out << "\n";
    }
    for (const auto& r : reports) {
        out << "\n" << r.system << ": " << r.questions << " questions, " << r.errors << " failed, " << r.indeterminate
            << " indeterminate labels";
    }
    out << "\n";
    return out.str();
}

namespace oracle {

namespace {

constexpr double kPercentIndeterminateBelowKcal = 1.0;

double field(const NutrientAmounts& a, std::size_t i) {
    switch (i) {
        case 0: return a.carbohydrate_g;
        case 1: return a.fat_g;
        case 2: return a.saturated_fat_g;
        case 3: return a.protein_g;
        case 4: return a.sodium_mg;
        case 5: return a.sugars_g;
        default: return a.fiber_g;
    }
}

double kcal_factor(const Thresholds& t, std::size_t i) {
    if (i == 0) return t.carb_kcal;
    if (i == 3) return t.protein_kcal;
    return t.fat_kcal;  // fat and saturated fat
}

// Value compared against the bound: grams/mg, or percent of energy.
std::optional<double> rule_value(const NutrientAmounts& a, const Thresholds& t, std::size_t i) {
    if (!t.bounds[i].percent) return field(a, i);
    if (a.energy_kcal < kPercentIndeterminateBelowKcal) return std::nullopt;
    return 100.0 * field(a, i) * kcal_factor(t, i) / a.energy_kcal;
}

const std::map<std::string, double>& mass_units() {
    static const std::map<std::string, double> kGrams = {
        {"g", 1.0}, {"kg", 1000.0}, {"mg", 0.001}, {"oz", 28.3495}, {"lb", 453.592},
    };
    return kGrams;
}

}  // namespace

Thresholds Thresholds::published() {
    Thresholds t;
    t.bounds[0] = {std::nullopt, 45.0, false, true};  // carbohydrate below 45 % of energy
    t.bounds[1] = {20.0, 35.0, true, true};           // fat 20 to 35 %
    t.bounds[2] = {std::nullopt, 10.0, false, true};  // saturated fat below 10 %
    t.bounds[3] = {15.0, 20.0, true, true};           // protein 15 to 20 %
    t.bounds[4] = {std::nullopt, 2300.0, true, false};  // sodium at most 2300 mg
    t.bounds[5] = {std::nullopt, 25.0, true, false};    // sugars at most 25 g
    t.bounds[6] = {20.0, 35.0, true, false};            // fiber 20 to 35 g
    return t;
}

Thresholds Thresholds::from_json(const nlohmann::json& j) {
    static const std::array<const char*, kNutrientCount> kNames = {
        "carbohydrate", "fat", "saturated_fat", "protein", "sodium", "sugars", "dietary_fiber",
    };
    Thresholds t;
    t.carb_kcal = j.at("atwater").at("carbohydrate").get<double>();
    t.protein_kcal = j.at("atwater").at("protein").get<double>();
    t.fat_kcal = j.at("atwater").at("fat").get<double>();
    std::array<bool, kNutrientCount> seen{};
    for (const auto& rule : j.at("rules")) {
        const auto name = rule.at("nutrient").get<std::string>();
        const auto it = std::find(kNames.begin(), kNames.end(), name);
        if (it == kNames.end()) throw Error(ErrorCode::InvalidGuidelines, "unknown nutrient " + name);
        const auto i = static_cast<std::size_t>(it - kNames.begin());
        Bound b;
        if (rule.contains("lower_bound") && !rule["lower_bound"].is_null()) b.lower = rule["lower_bound"].get<double>();
        if (rule.contains("upper_bound") && !rule["upper_bound"].is_null()) b.upper = rule["upper_bound"].get<double>();
        b.upper_inclusive = rule.at("upper_bound_inclusive").get<bool>();
        b.percent = rule.at("basis").get<std::string>() == "percent-of-energy";
        t.bounds[i] = b;
        seen[i] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error(ErrorCode::InvalidGuidelines, "guidelines must cover all seven nutrients");
    }
    return t;
}

LabelRow classify(const NutrientAmounts& totals, const Thresholds& t) {
    LabelRow row{};
    for (std::size_t i = 0; i < kNutrientCount; ++i) {
        const auto v = rule_value(totals, t, i);
        if (!v) {
            row[i] = RiskLabel::Indeterminate;
            continue;
        }
        const auto& b = t.bounds[i];
        bool ok = true;
        if (b.lower && *v < *b.lower) ok = false;
        if (b.upper && b.upper_inclusive && *v > *b.upper) ok = false;
        if (b.upper && !b.upper_inclusive && *v >= *b.upper) ok = false;
        row[i] = ok ? RiskLabel::NotRisky : RiskLabel::Risky;
    }
    return row;
}

FoodTable FoodTable::from_jsonl(std::istream& in) {
    FoodTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto record = nlohmann::json::parse(line);
        const auto index = table.records_.size();
        table.by_name_[normalize_name(record.at("name").get<std::string>())] = index;
        for (const auto& alias : record.value("aliases", nlohmann::json::array())) {
            table.by_name_[normalize_name(alias.get<std::string>())] = index;
        }
        table.records_.push_back(std::move(record));
    }
    return table;
}

FoodTable FoodTable::from_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaViolation, "cannot open " + path.string());
    return from_jsonl(in);
}

const nlohmann::json* FoodTable::find(const std::string& normalized) const {
    auto it = by_name_.find(normalized);
    return it == by_name_.end() ? nullptr : &records_[it->second];
}

std::optional<NutrientAmounts> meal_totals(const std::string& text, const FoodTable& foods) {
    std::vector<QuantifiedFood> items;
    try {
        items = parse_meal(text);
    } catch (const Error&) {
        return std::nullopt;
    }
    NutrientAmounts sum{};
    for (const auto& item : items) {
        const auto* record = foods.find(item.name);
        if (!record) return std::nullopt;
        const std::string unit(to_string(item.unit));
        double grams_per_unit = 0.0;
        if (auto m = mass_units().find(unit); m != mass_units().end()) {
            grams_per_unit = m->second;
        } else {
            for (const auto& s : record->at("servings")) {
                if (s.at("unit").get<std::string>() == unit) grams_per_unit = s.at("grams_per_unit").get<double>();
            }
            if (grams_per_unit == 0.0) return std::nullopt;
        }
        const double mass = item.quantity * grams_per_unit;
        const auto& p = record->at("per_100g");
        sum.energy_kcal += p.at("energy_kcal").get<double>() * mass / 100.0;
        sum.carbohydrate_g += p.at("carbohydrate_g").get<double>() * mass / 100.0;
        sum.fat_g += p.at("fat_g").get<double>() * mass / 100.0;
        sum.saturated_fat_g += p.at("saturated_fat_g").get<double>() * mass / 100.0;
        sum.protein_g += p.at("protein_g").get<double>() * mass / 100.0;
        sum.sodium_mg += p.at("sodium_mg").get<double>() * mass / 100.0;
        sum.sugars_g += p.at("sugars_g").get<double>() * mass / 100.0;
        sum.fiber_g += p.at("fiber_g").get<double>() * mass / 100.0;
    }
    return sum;
}

std::vector<GroundTruth> make_ground_truth(const std::vector<EvalQuestion>& corpus, const FoodTable& foods,
                                           const Thresholds& thresholds) {
    std::vector<GroundTruth> out;
    for (const auto& q : corpus) {
        GroundTruth g{q.id, std::nullopt, {}};
        if (auto totals = meal_totals(q.question, foods)) {
            auto labels = classify(*totals, thresholds);
            if (std::find(labels.begin(), labels.end(), RiskLabel::Indeterminate) != labels.end()) {
                g.reason = "energy below 1 kcal";
            } else {
                g.labels = labels;
            }
        } else {
            g.reason = "meal cannot be resolved against the food table";
        }
        out.push_back(std::move(g));
    }
    return out;
}

double boundary_margin(const NutrientAmounts& totals, const Thresholds& t) {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kNutrientCount; ++i) {
        const auto v = rule_value(totals, t, i);
        if (!v) return 0.0;
        for (auto b : {t.bounds[i].lower, t.bounds[i].upper}) {
            if (b) margin = std::min(margin, std::abs(*v - *b) / std::max(std::abs(*b), 1.0));
        }
    }
    return margin;
}

namespace {

struct MealPhrase {
    std::string text;
};

std::string article_for(const std::string& word) {
    return std::string("aeiou").find(word.front()) != std::string::npos ? "an" : "a";
}

// "eggs" only when it folds back to "egg", so the phrase stays parseable.
std::string plural_if_safe(const std::string& name) {
    try {
        if (normalize_name(name + "s") == name) return name + "s";
    } catch (const Error&) {
    }
    return name;
}

std::string unit_surface(const std::string& unit, bool plural) {
    if (!plural || unit == "g" || unit == "ml" || unit == "oz" || unit == "tbsp" || unit == "tsp") return unit;
    const auto canonical = unit_from_string(unit);
    if (canonical && unit_from_alias(unit + "s") == canonical) return unit + "s";
    if (canonical && unit_from_alias(unit + "es") == canonical) return unit + "es";
    return unit;
}

std::string describe_item(std::mt19937_64& rng, const nlohmann::json& record) {
    static const std::array<const char*, 12> kWords = {"one", "two",   "three", "four", "five",   "six",
                                                       "seven", "eight", "nine", "ten", "eleven", "twelve"};
    std::string name = record.at("name").get<std::string>();
    const auto aliases = record.value("aliases", nlohmann::json::array());
    if (!aliases.empty() && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
        name = aliases[std::uniform_int_distribution<std::size_t>(0, aliases.size() - 1)(rng)].get<std::string>();
    }
    const auto& servings = record.at("servings");
    // Unit choice: a serving from the table, or grams.
    const auto pick = std::uniform_int_distribution<std::size_t>(0, servings.size())(rng);
    if (pick == servings.size()) {
        const int grams = std::uniform_int_distribution<int>(2, 30)(rng) * 10;
        return std::to_string(grams) + (std::uniform_int_distribution<int>(0, 1)(rng) ? " g of " : "g ") + name;
    }
    const auto unit = servings[pick].at("unit").get<std::string>();
    const bool count = unit == "count";

    std::string qty;
    bool plural = false;
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
        case 0: qty = std::to_string(std::uniform_int_distribution<int>(1, 4)(rng)); plural = qty != "1"; break;
        case 1: qty = std::string(kWords[std::uniform_int_distribution<std::size_t>(0, 3)(rng)]); plural = qty != "one"; break;
        case 2: qty = "1/2"; break;
        case 3: qty = "1 1/2"; plural = true; break;
        case 4: qty = "2.5"; plural = true; break;
        case 5: qty = "half " + article_for(count ? name : unit); break;
        default: qty = article_for(count ? name : unit); break;
    }
    if (count) return qty + " " + (plural ? plural_if_safe(name) : name);
    return qty + " " + unit_surface(unit, plural) + " of " + name;
}

std::string join_items(std::mt19937_64& rng, const std::vector<std::string>& items) {
    static const std::array<const char*, 3> kLast = {" and ", " with ", " plus "};
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += i + 1 == items.size() ? kLast[std::uniform_int_distribution<std::size_t>(0, 2)(rng)] : ", ";
        out += items[i];
    }
    return out;
}

std::string phrase_question(std::mt19937_64& rng, const std::vector<std::string>& items) {
    const auto n = items.size();
    const auto style = std::uniform_int_distribution<int>(0, 3)(rng);
    if (style == 0 || n < 2) return "Today I had " + join_items(rng, items) + ". Is my diet risky?";
    if (style == 1) {
        const auto split = n / 2;
        std::vector<std::string> a(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(split));
        std::vector<std::string> b(items.begin() + static_cast<std::ptrdiff_t>(split), items.end());
        return "For breakfast I had " + join_items(rng, a) + ". For dinner I ate " + join_items(rng, b) +
               ". How does my day look?";
    }
    if (style == 2) return "I ate " + join_items(rng, items) + " today. Can you check my nutrients?";
    return join_items(rng, items) + ".";
}

}  // namespace

std::vector<EvalQuestion> generate_corpus(const FoodTable& foods, const Thresholds& t, const CorpusOptions& options) {
    if (foods.records().empty()) throw Error(ErrorCode::CorpusSchema, "food table is empty");
    std::mt19937_64 rng(options.seed);
    std::vector<EvalQuestion> corpus;
    std::array<std::array<std::size_t, 2>, kNutrientCount> seen{};  // [nutrient][Risky, NotRisky]
    std::size_t boundary = 0;

    auto missing_pairs = [&] {
        std::size_t m = 0;
        for (const auto& s : seen) m += (s[0] == 0) + (s[1] == 0);
        return m;
    };

    constexpr std::size_t kMaxAttempts = 500000;
    for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        if (corpus.size() >= options.questions && missing_pairs() == 0 && boundary >= options.boundary_adjacent) break;

        std::vector<std::string> items;
        const auto count = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
        for (std::size_t i = 0; i < count; ++i) {
            const auto& record =
                foods.records()[std::uniform_int_distribution<std::size_t>(0, foods.records().size() - 1)(rng)];
            items.push_back(describe_item(rng, record));
        }
        const auto question = phrase_question(rng, items);
        const auto totals = meal_totals(question, foods);
        if (!totals) continue;
        const double margin = boundary_margin(*totals, t);
        if (margin < options.min_margin) continue;
        const auto labels = classify(*totals, t);

        bool fills_pair = false;
        for (std::size_t c = 0; c < kNutrientCount; ++c) {
            if (seen[c][labels[c] == RiskLabel::Risky ? 0 : 1] == 0) fills_pair = true;
        }
        const bool near = margin < 0.05;
        const bool fills_boundary = near && boundary < options.boundary_adjacent;
        const std::size_t reserved = missing_pairs() + (options.boundary_adjacent - std::min(boundary, options.boundary_adjacent));
        const bool free_slot = corpus.size() + reserved < options.questions;
        if (!fills_pair && !fills_boundary && !free_slot) continue;

        for (std::size_t c = 0; c < kNutrientCount; ++c) ++seen[c][labels[c] == RiskLabel::Risky ? 0 : 1];
        if (near) ++boundary;
        char id[16];
        std::snprintf(id, sizeof id, "q%03zu", corpus.size() + 1);
        corpus.push_back({id, question, labels});
    }
    if (missing_pairs() != 0 || corpus.size() < options.questions) {
        throw Error(ErrorCode::CorpusSchema, "could not cover every nutrient's Risky and NotRisky side",
                    {{"questions", corpus.size()}});
    }
    return corpus;
}

}  // namespace oracle

}  // namespace dietcha
