#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <fstream>
#include <sstream>

#include "dietcha/error.h"
#include "dietcha/eval.h"
#include "test_support.h"

using namespace dietcha;
using dietcha::testing::bundled_source;
using dietcha::testing::default_guidelines;
using dietcha::testing::source_path;

namespace {

const std::vector<EvalQuestion>& bundled_corpus() {
    static const auto c = load_corpus(source_path("data/corpus.jsonl"));
    return c;
}

const oracle::FoodTable& food_table() {
    static const auto t = oracle::FoodTable::from_jsonl(source_path("data/foods.jsonl"));
    return t;
}

InProcessTarget in_process() { return InProcessTarget(make_deterministic_agent(bundled_source(), default_guidelines())); }

// Answers from a lookup table keyed by question text.
class TableTarget final : public EvalTarget {
public:
    explicit TableTarget(std::map<std::string, LabelRow> answers) : answers_(std::move(answers)) {}
    LabelRow ask(const std::string& q) override {
        auto it = answers_.find(q);
        if (it == answers_.end()) throw Error(ErrorCode::FoodNotFound, "no answer");
        return it->second;
    }

private:
    std::map<std::string, LabelRow> answers_;
};

}  // namespace

TEST(Corpus, BundledCorpusScoresFull) {
    auto target = in_process();
    const auto report = run_eval(bundled_corpus(), target, "CHA");
    EXPECT_EQ(report.questions, bundled_corpus().size());
    EXPECT_GE(report.questions, 60u);
    for (double a : report.accuracy) EXPECT_DOUBLE_EQ(a, 100.0);
    EXPECT_EQ(report.errors, 0u);
    EXPECT_EQ(report.indeterminate, 0u);
}

TEST(Corpus, BundledLabelsMatchOracle) {
    const auto truth = oracle::make_ground_truth(bundled_corpus(), food_table(), oracle::Thresholds::published());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ASSERT_TRUE(truth[i].labels.has_value()) << truth[i].reason;
        EXPECT_EQ(*truth[i].labels, bundled_corpus()[i].ground_truth) << truth[i].id;
    }
}

TEST(Corpus, UnresolvableQuestionCountsAgainstEveryColumn) {
    std::vector<EvalQuestion> corpus(bundled_corpus().begin(), bundled_corpus().begin() + 60);
    corpus[17].question = "Today I had a plate of unobtainium. Is my diet risky?";
    auto target = in_process();
    const auto report = run_eval(corpus, target, "CHA");
    for (double a : report.accuracy) EXPECT_NEAR(a, 59.0 / 60.0 * 100.0, 1e-9);
    EXPECT_EQ(report.errors, 1u);
    EXPECT_TRUE(report.rows[17].error.has_value());
}

TEST(Corpus, ShuffleInvariantAndConcurrent) {
    auto target = in_process();
    const auto base = run_eval(bundled_corpus(), target, "CHA");
    auto shuffled = bundled_corpus();
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(5));
    EXPECT_EQ(run_eval(shuffled, target, "CHA").accuracy, base.accuracy);
    EXPECT_EQ(run_eval(bundled_corpus(), target, "CHA", 4), base);
}

TEST(Corpus, LoadErrorsCarryLineNumbers) {
    std::istringstream bad(
        R"({"id": "q1", "question": "2 eggs", "ground_truth": {"carbohydrate": "R", "fat": "NR", "saturated_fat": "NR", "protein": "R", "sodium": "NR", "sugars": "NR", "dietary_fiber": "R"}})"
        "\n\n{\"id\": \"q2\"}\n");
    try {
        load_corpus(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CorpusSchema);
        EXPECT_EQ(e.details().at("line"), 3);
    }
    std::ostringstream out;
    write_corpus(out, bundled_corpus());
    std::istringstream in(out.str());
    EXPECT_EQ(load_corpus(in), bundled_corpus());
}

TEST(Report, Formats) {
    EvalReport a;
    a.system = "ChatGPT";
    a.questions = 4;
    a.accuracy = {75, 50, 100, 25, 100, 75, 50};
    EvalReport b;
    b.system = "Proposed CHA";
    b.questions = 4;
    b.accuracy = {100, 100, 100, 100, 100, 100, 100};

    const auto csv = render_report({a, b}, ReportFormat::Csv);
    EXPECT_EQ(csv,
              "system,carbohydrate,fat,saturated_fat,protein,sodium,sugars,dietary_fiber\n"
              "ChatGPT,75,50,100,25,100,75,50\n"
              "Proposed CHA,100,100,100,100,100,100,100\n");

    const auto table = render_report({a, b}, ReportFormat::Table);
    EXPECT_NE(table.find("System"), std::string::npos);
    EXPECT_NE(table.find("Saturated Fat"), std::string::npos);
    EXPECT_NE(table.find("Proposed CHA"), std::string::npos);
    EXPECT_NE(table.find("100%"), std::string::npos);

    const auto j = nlohmann::json::parse(render_report({a, b}, ReportFormat::Json));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(eval_report_from_json(j[1]), b);
    EXPECT_FALSE(report_format_from_string("xml").has_value());
}

TEST(Report, JsonRoundTripWithRows) {
    auto target = in_process();
    std::vector<EvalQuestion> corpus(bundled_corpus().begin(), bundled_corpus().begin() + 5);
    corpus[2].question = "hello";
    const auto report = run_eval(corpus, target, "CHA");
    EXPECT_EQ(eval_report_from_json(to_json(report)), report);
}

TEST(Eval, IndeterminateIsAMismatch) {
    LabelRow truth;
    truth.fill(RiskLabel::NotRisky);
    LabelRow predicted = truth;
    predicted[0] = RiskLabel::Indeterminate;
    TableTarget target({{"q", predicted}});
    const auto report = run_eval({{"1", "q", truth}}, target, "t");
    EXPECT_DOUBLE_EQ(report.accuracy[0], 0.0);
    EXPECT_DOUBLE_EQ(report.accuracy[1], 100.0);
    EXPECT_EQ(report.indeterminate, 1u);
}

TEST(Oracle, AgreesWithProductionClassifier) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> g(0.0, 400.0);
    const auto t = oracle::Thresholds::published();
    for (int i = 0; i < 500; ++i) {
        const double carb = g(rng), fat = g(rng) / 3, protein = g(rng) / 2;
        NutrientAmounts a{4 * carb + 9 * fat + 4 * protein + g(rng) / 10, carb, fat, fat * 0.3, protein,
                          g(rng) * 10, carb * 0.2, g(rng) / 8};
        const auto report = assess_risk(NutrientVector(a), *default_guidelines());
        EXPECT_EQ(oracle::classify(a, t), report.labels) << i;
    }
}

TEST(Oracle, ThresholdsFromBundledGuidelines) {
    std::ifstream in(source_path("data/guidelines.json"));
    const auto from_file = oracle::Thresholds::from_json(nlohmann::json::parse(in));
    const auto published = oracle::Thresholds::published();
    for (std::size_t i = 0; i < kNutrientCount; ++i) {
        EXPECT_EQ(from_file.bounds[i].lower, published.bounds[i].lower) << i;
        EXPECT_EQ(from_file.bounds[i].upper, published.bounds[i].upper) << i;
        EXPECT_EQ(from_file.bounds[i].upper_inclusive, published.bounds[i].upper_inclusive) << i;
        EXPECT_EQ(from_file.bounds[i].percent, published.bounds[i].percent) << i;
    }
}

TEST(Oracle, MealTotalsMatchResolver) {
    for (const auto& q : bundled_corpus()) {
        const auto o = oracle::meal_totals(q.question, food_table());
        ASSERT_TRUE(o.has_value()) << q.question;
        const auto r = resolve_meal(q.question, *dietcha::testing::bundled_index()).total;
        EXPECT_NEAR(o->energy_kcal, r.energy_kcal(), 1e-9 * (1 + r.energy_kcal()));
        EXPECT_NEAR(o->sodium_mg, r.sodium_mg(), 1e-9 * (1 + r.sodium_mg()));
    }
    EXPECT_FALSE(oracle::meal_totals("a plate of unobtainium", food_table()).has_value());
}

TEST(Generator, SeededAndCoversBothLabels) {
    oracle::CorpusOptions opt;
    opt.questions = 40;
    opt.seed = 7;
    const auto a = oracle::generate_corpus(food_table(), oracle::Thresholds::published(), opt);
    const auto b = oracle::generate_corpus(food_table(), oracle::Thresholds::published(), opt);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 40u);
    for (std::size_t n = 0; n < kNutrientCount; ++n) {
        bool risky = false, fine = false;
        for (const auto& q : a) {
            risky |= q.ground_truth[n] == RiskLabel::Risky;
            fine |= q.ground_truth[n] == RiskLabel::NotRisky;
        }
        EXPECT_TRUE(risky && fine) << n;
    }
    for (const auto& q : a) {
        const auto totals = oracle::meal_totals(q.question, food_table());
        ASSERT_TRUE(totals.has_value());
        EXPECT_GE(oracle::boundary_margin(*totals, oracle::Thresholds::published()), opt.min_margin);
    }
}

TEST(Baseline, ParsesLabelLines) {
    const auto row = parse_baseline_reply(
        "Here is my assessment.\nCarbohydrate: Risky\nFat: Not Risky\nSaturated Fat: not risky\nProtein: Risky\n"
        "Sodium: Not Risky\nSugars: RISKY\nDietary Fiber: Risky\n");
    const LabelRow expected = {RiskLabel::Risky,    RiskLabel::NotRisky, RiskLabel::NotRisky, RiskLabel::Risky,
                               RiskLabel::NotRisky, RiskLabel::Risky,    RiskLabel::Risky};
    EXPECT_EQ(row, expected);
    EXPECT_THROW(parse_baseline_reply("Carbohydrate: Risky"), Error);
    EXPECT_NE(render_baseline_prompt("2 eggs").find("2 eggs"), std::string::npos);
}

TEST(Baseline, ScriptedBackend) {
    dietcha::testing::OfflineGuard offline;
    auto backend = std::make_shared<ScriptedChatBackend>(std::vector<ScriptedChatBackend::Exchange>{
        {{"2 eggs"},
         "carbohydrate: Risky\nfat: Risky\nsaturated_fat: Risky\nprotein: Risky\nsodium: Risky\nsugars: Risky\n"
         "dietary_fiber: Risky"}});
    ChatBaselineTarget target(backend, ChatBackendConfig{});
    const auto row = target.ask("2 eggs");
    for (auto l : row) EXPECT_EQ(l, RiskLabel::Risky);
    EXPECT_EQ(offline.calls(), 0);
}
