#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "dietcha/agent.h"
#include "dietcha/error.h"
#include "dietcha/planner.h"
#include "test_support.h"

using namespace dietcha;
using dietcha::testing::bundled_source;
using dietcha::testing::default_guidelines;
using dietcha::testing::OfflineGuard;

namespace {

std::vector<std::string> actions(const TurnTrace& t) {
    std::vector<std::string> out;
    for (const auto& r : t.records) out.push_back(r.plan_step.action);
    return out;
}

const std::vector<std::string> kMealTurn = {"meal_nutrition_lookup", "diet_risk_assessment", "Final"};

std::shared_ptr<ScriptedChatBackend> script(std::vector<std::string> replies) {
    std::vector<ScriptedChatBackend::Exchange> ex;
    for (auto& r : replies) ex.push_back({{}, std::move(r)});
    return std::make_shared<ScriptedChatBackend>(std::move(ex));
}

std::shared_ptr<Agent> llm_agent(std::shared_ptr<ChatBackend> planner_backend,
                                 std::shared_ptr<ChatBackend> responder_backend, int max_steps = 5) {
    ChatBackendConfig config;
    return std::make_shared<Agent>(AgentMode::Llm, std::make_shared<LlmPlanner>(planner_backend, config),
                                   std::make_shared<LlmResponder>(responder_backend, config),
                                   make_default_registry(bundled_source(), default_guidelines()), max_steps);
}

class Failing final : public ChatBackend {
public:
    std::string complete(const ChatRequest&) override {
        throw Error(ErrorCode::BackendUnavailable, "down");
    }
};

const std::regex& number_pattern() {
    static const std::regex re(R"(\d+(?:\.\d+)?)");
    return re;
}

std::vector<std::string> numbers_in(const std::string& text) {
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number_pattern()); it != std::sregex_iterator(); ++it) {
        out.push_back(it->str());
    }
    return out;
}

// Numbers that occur inside string values, i.e. text the responder may quote.
void collect_numbers(const nlohmann::json& j, std::set<std::string>& out) {
    if (j.is_string()) {
        for (auto& n : numbers_in(j.get<std::string>())) out.insert(n);
    } else if (j.is_structured()) {
        for (const auto& v : j) collect_numbers(v, out);
    }
}

}  // namespace

TEST(RulePlanner, ExplanationCues) {
    EXPECT_TRUE(is_explanation_request("How did you compute that?"));
    EXPECT_TRUE(is_explanation_request("can you explain your answer"));
    EXPECT_FALSE(is_explanation_request("I had 2 eggs"));
}

TEST(ParsePlanReply, GrammarAndLastActionWins) {
    const auto registry = make_default_registry(bundled_source(), default_guidelines());
    const TaskRegistry& reg = *registry;
    DataPipe pipe;
    const auto key = pipe.put("meal_nutrition_lookup", "meal_nutrition", nlohmann::json::object(), 0);

    const auto step = parse_plan_reply(
        "Thought: candidates are lookup, assess, final\nAction: meal_nutrition_lookup\nAction Input: {\"meal\": \"x\"}\n"
        "Thought: the nutrition is already there\nAction: diet_risk_assessment\nAction Input: {\"nutrition\": \"$pipe:" +
            key + "\"}",
        reg, pipe);
    EXPECT_EQ(step.action, "diet_risk_assessment");
    EXPECT_EQ(step.action_input.at("nutrition"), "$pipe:" + key);
    EXPECT_EQ(step.thought, "the nutrition is already there");

    EXPECT_TRUE(parse_plan_reply("Thought: done\nAction: final\nAction Input: {}", reg, pipe).is_final());

    for (const char* bad : {"no grammar here", "Action: teleport\nAction Input: {}",
                            "Action: diet_risk_assessment\nAction Input: {\"nutrition\": \"$pipe:k99\"}",
                            "Action: meal_nutrition_lookup\nAction Input: {\"meal\": "}) {
        try {
            parse_plan_reply(bad, reg, pipe);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnparseableAction) << bad;
            EXPECT_TRUE(e.details().contains("reason"));
            EXPECT_EQ(e.details().at("raw"), bad);
        }
    }
}

TEST(Agent, MealTurnTrace) {
    OfflineGuard offline;
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines());
    Session s("s1");
    const auto r = agent->run_turn(s, "I had 2 slices of whole wheat toast and a boiled egg");
    EXPECT_EQ(actions(r.trace), kMealTurn);
    EXPECT_EQ(r.trace.trace_id, "s1-t1");
    EXPECT_FALSE(r.trace.budget_exhausted);
    for (const auto& rec : r.trace.records) EXPECT_TRUE(rec.ok) << rec.summary;
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        EXPECT_LT(r.trace.records[i - 1].step_index, r.trace.records[i].step_index);
    }
    ASSERT_TRUE(r.response.risk_report.has_value());
    EXPECT_NEAR(s.day_totals().energy_kcal(), 2 * 28 * 2.52 + 50 * 1.55, 1e-9);
    EXPECT_EQ(s.transcript().size(), 2u);
    EXPECT_EQ(offline.calls(), 0);
}

TEST(Agent, FollowUpAccumulatesDayTotals) {
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines());
    Session s("s2");
    agent->run_turn(s, "2 eggs and 1 cup rice");
    const auto first = s.day_totals();
    const auto r = agent->run_turn(s, "what about adding a candy bar?");
    EXPECT_EQ(actions(r.trace), kMealTurn);
    const auto candy = resolve_meal("a candy bar", *dietcha::testing::bundled_index()).total;
    EXPECT_NEAR(s.day_totals().energy_kcal(), first.energy_kcal() + candy.energy_kcal(), 1e-9);
    EXPECT_NEAR(r.response.risk_report->totals.sugars_g(), first.sugars_g() + candy.sugars_g(), 1e-9);
    EXPECT_EQ(s.traces().size(), 2u);
    EXPECT_EQ(r.trace.trace_id, "s2-t2");
}

TEST(Agent, ExplanationUsesNoTasks) {
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines());
    Session s("s3");
    agent->run_turn(s, "I had a banana");
    const auto before = s.pipe().entries().size();
    const auto r = agent->run_turn(s, "How did you compute that?");
    EXPECT_EQ(actions(r.trace), std::vector<std::string>{"Final"});
    EXPECT_EQ(s.pipe().entries().size(), before);
    EXPECT_NE(r.response.text.find("meal_nutrition_lookup"), std::string::npos);
    EXPECT_NE(r.response.text.find("diet_risk_assessment"), std::string::npos);
}

TEST(Agent, SmallTalkAndUnknownFood) {
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines());
    Session s("s4");
    const auto hello = agent->run_turn(s, "hello there");
    EXPECT_EQ(actions(hello.trace), std::vector<std::string>{"Final"});
    EXPECT_FALSE(hello.response.risk_report.has_value());

    // no known food at all reads as small talk
    EXPECT_EQ(actions(agent->run_turn(s, "I had a plate of unobtainium").trace), std::vector<std::string>{"Final"});

    const auto r = agent->run_turn(s, "I had 2 cups of boiled egg");
    ASSERT_FALSE(r.trace.records.empty());
    EXPECT_FALSE(r.trace.records[0].ok);
    EXPECT_EQ(r.trace.records[0].error.at("code"), "MealUnresolvable");
    EXPECT_FALSE(r.response.risk_report.has_value());
    EXPECT_EQ(s.day_totals(), NutrientVector{});
}

TEST(ExecuteStep, MissingKeyIsCaptured) {
    auto reg = make_default_registry(bundled_source(), default_guidelines());
    DataPipe pipe;
    PlanStep step{"", "diet_risk_assessment", {{"nutrition", "$pipe:k42"}}};
    const auto rec = execute_step(step, *reg, pipe, 0);
    EXPECT_FALSE(rec.ok);
    EXPECT_EQ(rec.error.at("code"), "MissingKey");
    EXPECT_TRUE(pipe.entries().empty());

    PlanStep unknown{"", "teleport", nlohmann::json::object()};
    EXPECT_EQ(execute_step(unknown, *reg, pipe, 0).error.at("code"), "UnknownTask");
}

TEST(Agent, StepBudget) {
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines(), 1);
    Session s("s5");
    const auto r = agent->run_turn(s, "2 eggs");
    EXPECT_TRUE(r.trace.budget_exhausted);
    EXPECT_EQ(actions(r.trace), std::vector<std::string>{"meal_nutrition_lookup"});
}

TEST(LlmAgent, ScriptedTurnStaysOffline) {
    OfflineGuard offline;
    auto planner = script({
        "Thought: a) lookup b) assess c) final. Lookup first.\nAction: meal_nutrition_lookup\nAction Input: {\"meal\": \"2 eggs\"}",
        "Thought: assess the stored nutrition\nAction: diet_risk_assessment\nAction Input: {\"nutrition\": \"$pipe:k1\"}",
        "Thought: done\nAction: Final\nAction Input: {}",
    });
    auto agent = llm_agent(planner, std::make_shared<EchoChatBackend>());
    Session s("s6");
    const auto r = agent->run_turn(s, "I had 2 eggs");
    EXPECT_EQ(actions(r.trace), kMealTurn);
    EXPECT_EQ(planner->remaining(), 0u);
    EXPECT_FALSE(r.response.degraded);
    // The echo backend returns the prompt, so the totals must have reached it.
    const auto display = s.pipe().get("k2")->payload.at("display").at("energy_kcal").get<std::string>();
    EXPECT_NE(r.response.text.find(display), std::string::npos);
    EXPECT_EQ(offline.calls(), 0);
    const auto first_prompt = planner->received().at(0).messages.at(0).content;
    EXPECT_NE(first_prompt.find("meal_nutrition_lookup"), std::string::npos);
}

TEST(LlmAgent, ResponderFailureDegrades) {
    auto planner = script({
        "Action: meal_nutrition_lookup\nAction Input: {\"meal\": \"a banana\"}",
        "Action: diet_risk_assessment\nAction Input: {\"nutrition\": \"$pipe:k1\"}",
        "Action: Final\nAction Input: {}",
    });
    auto agent = llm_agent(planner, std::make_shared<Failing>());
    Session s("s7");
    const auto r = agent->run_turn(s, "I had a banana");
    EXPECT_TRUE(r.response.degraded);
    EXPECT_TRUE(r.trace.degraded);
    EXPECT_NE(r.response.text.find("Your intake so far today"), std::string::npos);
}

TEST(LlmAgent, RepromptsThenGivesUp) {
    auto planner = script({"gibberish", "more gibberish", "still gibberish"});
    auto agent = llm_agent(planner, std::make_shared<Failing>());
    Session s("s8");
    const auto r = agent->run_turn(s, "I had a banana");
    EXPECT_EQ(planner->received().size(), 3u);
    ASSERT_EQ(r.trace.records.size(), 1u);
    EXPECT_FALSE(r.trace.records[0].ok);
    EXPECT_EQ(r.trace.records[0].error.at("code"), "UnparseableAction");

    auto recovering = script({"gibberish", "Action: Final\nAction Input: {}"});
    auto agent2 = llm_agent(recovering, std::make_shared<Failing>());
    Session s2("s9");
    EXPECT_TRUE(agent2->run_turn(s2, "hi").trace.records.at(0).ok);
    EXPECT_EQ(recovering->received().size(), 2u);
}

TEST(LlmAgent, PlannerOutageLeavesSessionUntouched) {
    auto agent = llm_agent(std::make_shared<Failing>(), std::make_shared<Failing>());
    Session s("s10");
    EXPECT_THROW(agent->run_turn(s, "I had a banana"), Error);
    EXPECT_TRUE(s.transcript().empty());
    EXPECT_TRUE(s.traces().empty());
}

TEST(Agent, AnswersOnlyQuotePayloadNumbers) {
    auto agent = make_deterministic_agent(bundled_source(), default_guidelines());
    const std::vector<std::string> meals = {"2 slices of whole wheat toast and a boiled egg",
                                            "1 1/2 cups rice, half an apple", "a slice of pizza and a cola",
                                            "I had 3 oz salmon with broccoli and a glass of red wine"};
    for (const auto& meal : meals) {
        Session s("g");
        const auto r = agent->run_turn(s, meal);
        std::set<std::string> grounded;
        const auto pipe = s.pipe();
        for (const auto& e : pipe.entries()) collect_numbers(e->payload, grounded);
        for (const auto& n : numbers_in(r.response.text)) {
            EXPECT_TRUE(grounded.count(n)) << n << " in\n" << r.response.text;
        }
    }
}

TEST(Session, BusyFlag) {
    Session s("b");
    EXPECT_TRUE(s.try_begin_turn());
    EXPECT_FALSE(s.try_begin_turn());
    s.end_turn();
    EXPECT_TRUE(s.try_begin_turn());
    s.end_turn();
}
