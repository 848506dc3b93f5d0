#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dietcha/agent.h"
#include "dietcha/chat_backend.h"
#include "dietcha/http_transport.h"
#include "dietcha/nutrients.h"
#include "dietcha/risk.h"

namespace dietcha {

using LabelRow = std::array<RiskLabel, kNutrientCount>;

/// One corpus row: a meal inquiry and its seven ground-truth labels in
/// carbohydrate, fat, saturated fat, protein, sodium, sugars, fiber order.
struct EvalQuestion {
    std::string id;
    std::string question;
    LabelRow ground_truth{};

    friend bool operator==(const EvalQuestion&, const EvalQuestion&) = default;
};

/// "R" / "NR" wire labels.
std::string_view short_label(RiskLabel label);
nlohmann::json to_json(const EvalQuestion& q);
EvalQuestion eval_question_from_json(const nlohmann::json& j);

/// JSON Lines; blank lines skipped. Throws CorpusSchema with details.line.
std::vector<EvalQuestion> load_corpus(std::istream& in);
std::vector<EvalQuestion> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<EvalQuestion>& corpus);

/// Something that answers a meal inquiry with seven labels. Throws on any
/// failure, including a reply that carries no risk report.
class EvalTarget {
public:
    virtual ~EvalTarget() = default;
    virtual LabelRow ask(const std::string& question) = 0;
};

/// Runs each question through the agent in a fresh in-memory session.
class InProcessTarget final : public EvalTarget {
public:
    explicit InProcessTarget(std::shared_ptr<const Agent> agent);
    LabelRow ask(const std::string& question) override;

private:
    std::shared_ptr<const Agent> agent_;
};

/// Runs each question against a running gateway in a fresh session.
class GatewayTarget final : public EvalTarget {
public:
    explicit GatewayTarget(std::string base_url, std::shared_ptr<net::Transport> transport = nullptr);
    LabelRow ask(const std::string& question) override;

private:
    std::string base_url_;
    std::shared_ptr<net::Transport> transport_;
};

/// Optional baseline: sends the question with a plain instruction prompt to a
/// chat model and reads seven labels from its reply. Informational only.
class ChatBaselineTarget final : public EvalTarget {
public:
    ChatBaselineTarget(std::shared_ptr<ChatBackend> backend, ChatBackendConfig config);
    LabelRow ask(const std::string& question) override;

private:
    std::shared_ptr<ChatBackend> backend_;
    ChatBackendConfig config_;
};

std::string render_baseline_prompt(const std::string& question);
/// Reads "<nutrient>: Risky|Not Risky" lines. Throws UnparseableResponse
/// unless all seven nutrients are labelled.
LabelRow parse_baseline_reply(const std::string& reply);

struct EvalRow {
    std::string id;
    std::array<bool, kNutrientCount> match{};
    std::optional<LabelRow> predicted;
    std::optional<std::string> error;

    friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalReport {
    std::string system;
    std::size_t questions = 0;
    /// Percent of all questions whose label matched, per nutrient.
    std::array<double, kNutrientCount> accuracy{};
    std::vector<EvalRow> rows;
    std::size_t indeterminate = 0;  // predicted labels that were Indeterminate
    std::size_t errors = 0;         // questions whose pipeline failed

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Indeterminate labels and failed questions count as mismatches; the
/// denominator is every question. `jobs` > 1 asks questions concurrently.
EvalReport run_eval(const std::vector<EvalQuestion>& corpus, EvalTarget& target, std::string system,
                    unsigned jobs = 1);

enum class ReportFormat { Table, Csv, Json };
std::optional<ReportFormat> report_format_from_string(std::string_view s);

/// One row per system, seven accuracy columns rounded to whole percents for
/// table and csv; json carries the full reports.
std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

/// Independent ground-truth oracle. It shares only the meal grammar with the
/// production path; food lookup, unit conversion, summation, percent
/// arithmetic and threshold comparison are written out separately here.
namespace oracle {

struct Bound {
    std::optional<double> lower;
    std::optional<double> upper;
    bool upper_inclusive = true;
    bool percent = false;
};

struct Thresholds {
    std::array<Bound, kNutrientCount> bounds;
    double carb_kcal = 4.0;
    double protein_kcal = 4.0;
    double fat_kcal = 9.0;

    /// The published diabetes thresholds, written out literally.
    static Thresholds published();
    /// Reads a guidelines.json document directly.
    static Thresholds from_json(const nlohmann::json& j);
};

/// Totals in NutrientAmounts field order.
LabelRow classify(const NutrientAmounts& totals, const Thresholds& t);

/// Raw food table: normalized name or alias -> the record's JSON object.
class FoodTable {
public:
    static FoodTable from_jsonl(std::istream& in);
    static FoodTable from_jsonl(const std::filesystem::path& path);
    const nlohmann::json* find(const std::string& normalized) const;
    const std::vector<nlohmann::json>& records() const { return records_; }

private:
    std::vector<nlohmann::json> records_;
    std::map<std::string, std::size_t> by_name_;
};

/// Sums a meal. nullopt when any item cannot be resolved.
std::optional<NutrientAmounts> meal_totals(const std::string& text, const FoodTable& foods);

struct GroundTruth {
    std::string id;
    std::optional<LabelRow> labels;  // nullopt: flagged, excluded
    std::string reason;
};

std::vector<GroundTruth> make_ground_truth(const std::vector<EvalQuestion>& corpus, const FoodTable& foods,
                                           const Thresholds& thresholds);

/// Smallest relative distance between any rule value of the totals and any
/// bound; used to keep generated meals away from knife-edge cases.
double boundary_margin(const NutrientAmounts& totals, const Thresholds& t);

struct CorpusOptions {
    std::uint64_t seed = 2024;
    std::size_t questions = 64;
    std::size_t boundary_adjacent = 8;  // meals with some value within 5% of a bound
    double min_margin = 1e-6;
};

/// Seeded synthetic corpus whose labels come from this oracle. Guarantees
/// both labels appear in every column.
std::vector<EvalQuestion> generate_corpus(const FoodTable& foods, const Thresholds& t, const CorpusOptions& options);

}  // namespace oracle

}  // namespace dietcha
