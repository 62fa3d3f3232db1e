#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "apigraph/agent.hpp"
#include "apigraph/errors.hpp"
#include "apigraph/prompts.hpp"

using namespace apigraph;
namespace fs = std::filesystem;

namespace {

/// Shipped corpus + simulated environment, chat rules added per test.
struct Rig {
    Corpus corpus;
    SimEnvironment env;
    ScriptedProvider provider;
    DocIndex index;
    Rig()
        : corpus(load_corpus("data/corpus/sim_corpus.jsonl")),
          env(SimEnvironment::from_manifest("data/sim/manifest.json")),
          index(build_index(corpus, provider)) {}
    AgentRunner runner() { return AgentRunner(provider, env, corpus, index); }
};

const char* kQuery = "What are the tax deductions for a Data Scientist's salary?";

void add_make_call_rules(ScriptedProvider& p) {
    p.add_rule(prompts::kAgentMakeCall, {"\"name\":\"TaxCalculator\""},
               R"({"salary": 150000.0})");
    p.add_rule(prompts::kAgentMakeCall, {"\"name\":\"GetOccupationSalary\""},
               R"({"occupation": "Data Scientist"})");
}

void add_select_call_rules(ScriptedProvider& p) {
    p.add_rule(prompts::kAgentSelectCall,
               {"\"Subinstruction\":\"Calculate the tax"},
               R"({"action": {"api_name": "TaxCalculator",
                              "input": {"salary": 150000.0}}})");
    p.add_rule(prompts::kAgentSelectCall,
               {"\"Subinstruction\":\"Retrieve the salary"},
               R"({"action": {"api_name": "GetOccupationSalary",
                              "input": {"occupation": "Data Scientist"}}})");
}

} // namespace

TEST_CASE("global agent: plan once, execute in order, answer") {
    Rig rig;
    rig.provider.add_default(
        prompts::kAgentGlobalPlan,
        R"({"plan": ["GetOccupationSalary", "TaxCalculator"]})");
    add_make_call_rules(rig.provider);
    rig.provider.add_default(prompts::kAgentAnswer,
                             R"({"final_answer": "Net salary is 105000."})");

    Trajectory t = rig.runner().run_global(kQuery);
    CHECK(t.agent == "global");
    CHECK(t.plan == std::vector<std::string>{"GetOccupationSalary",
                                             "TaxCalculator"});
    CHECK(t.retrieved.size() == 5);
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].output.response == json{{"salary", 150000}});
    CHECK(t.steps[1].output.response == json{{"salary_after_tax", 105000.0}});
    CHECK(t.executed_names() ==
          std::vector<std::string>{"GetOccupationSalary", "TaxCalculator"});
    CHECK(t.final_answer == "Net salary is 105000.");
}

TEST_CASE("global agent: unknown planned function is flagged, run continues") {
    Rig rig;
    rig.provider.add_default(
        prompts::kAgentGlobalPlan,
        R"({"plan": ["NoSuchFunction", "GetOccupationSalary"]})");
    add_make_call_rules(rig.provider);
    rig.provider.add_default(prompts::kAgentAnswer,
                             R"({"final_answer": "partial"})");

    Trajectory t = rig.runner().run_global(kQuery);
    REQUIRE(t.steps.size() == 2);
    CHECK_FALSE(t.steps[0].executed);
    CHECK(t.steps[0].flags == std::vector<std::string>{"UnknownFunction"});
    CHECK(t.steps[1].executed);
    // Only planned functions ever execute.
    CHECK(t.executed_names() == std::vector<std::string>{"GetOccupationSalary"});
}

TEST_CASE("global agent: malformed argument reply is flagged, run continues") {
    Rig rig;
    rig.provider.add_default(
        prompts::kAgentGlobalPlan,
        R"({"plan": ["GetOccupationSalary", "TaxCalculator"]})");
    rig.provider.add_rule(prompts::kAgentMakeCall,
                          {"\"name\":\"TaxCalculator\""},
                          R"({"salary": 150000.0})");
    rig.provider.add_rule(prompts::kAgentMakeCall,
                          {"\"name\":\"GetOccupationSalary\""},
                          "this is not json and stays not json");
    rig.provider.add_default(prompts::kAgentAnswer,
                             R"({"final_answer": "partial"})");

    Trajectory t = rig.runner().run_global(kQuery);
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].flags == std::vector<std::string>{"ArgError"});
    CHECK_FALSE(t.steps[0].executed);
    CHECK(t.steps[1].executed);
}

TEST_CASE("global agent: empty plan raises PlanParseError") {
    Rig rig;
    rig.provider.add_default(prompts::kAgentGlobalPlan, R"({"plan": []})");
    CHECK_THROWS_AS(rig.runner().run_global(kQuery), PlanParseError);
}

TEST_CASE("react agent: act, observe, act, finish") {
    Rig rig;
    rig.provider.add_rule(prompts::kAgentReactStep, {"\"salary_after_tax\""},
                          R"({"finish": {"final_answer": "done after tax"}})");
    rig.provider.add_rule(prompts::kAgentReactStep, {"\"salary\":150000"},
                          R"({"action": {"api_name": "TaxCalculator",
                                         "input": {"salary": 150000.0}}})",
                          {"\"salary_after_tax\""});
    rig.provider.add_rule(prompts::kAgentReactStep, {"\"History\":[]"},
                          R"({"action": {"api_name": "GetOccupationSalary",
                              "input": {"occupation": "Data Scientist"}}})");

    Trajectory t = rig.runner().run_react(kQuery, 5, 10);
    CHECK(t.agent == "react");
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[1].output.response == json{{"salary_after_tax", 105000.0}});
    CHECK(t.final_answer == "done after tax");
    CHECK(t.flags.empty());
}

TEST_CASE("react agent: immediate finish produces an empty trajectory") {
    Rig rig;
    rig.provider.add_default(prompts::kAgentReactStep,
                             R"({"finish": {"final_answer": "no calls"}})");
    Trajectory t = rig.runner().run_react(kQuery);
    CHECK(t.steps.empty());
    CHECK(t.final_answer == "no calls");
    CHECK(t.flags.empty());
}

TEST_CASE("react agent: hits the step limit and says so") {
    Rig rig;
    rig.provider.add_default(prompts::kAgentReactStep,
                             R"({"action": {"api_name": "NoSuchFunction",
                                            "input": {}}})");
    Trajectory t = rig.runner().run_react(kQuery, 5, 3);
    CHECK(t.steps.size() == 3);
    for (const auto& s : t.steps) {
        CHECK(s.flags == std::vector<std::string>{"UnknownFunction"});
        CHECK_FALSE(s.executed);
    }
    CHECK(t.flags == std::vector<std::string>{"StepLimitReached"});
}

TEST_CASE("react agent: malformed action is flagged and skipped") {
    Rig rig;
    rig.provider.add_rule(prompts::kAgentReactStep, {"\"History\":[]"},
                          R"({"thought": "no action here"})");
    rig.provider.add_default(prompts::kAgentReactStep,
                             R"({"finish": {"final_answer": "ok"}})");
    Trajectory t = rig.runner().run_react(kQuery);
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].flags == std::vector<std::string>{"BadAction"});
    CHECK_FALSE(t.steps[0].executed);
    CHECK(t.final_answer == "ok");
}

TEST_CASE("react decomposer: one retrieval and one call per subinstruction") {
    Rig rig;
    rig.provider.add_rule(prompts::kAgentNextSubinstruction,
                          {"\"salary_after_tax\""},
                          R"({"finish": {"final_answer": "decomposed"}})");
    rig.provider.add_rule(
        prompts::kAgentNextSubinstruction, {"\"salary\":150000"},
        R"({"subinstruction": "Calculate the tax for a salary of 150000."})",
        {"\"salary_after_tax\""});
    rig.provider.add_rule(
        prompts::kAgentNextSubinstruction, {"\"History\":[]"},
        R"({"subinstruction": "Retrieve the salary for a Data Scientist."})");
    add_select_call_rules(rig.provider);

    Trajectory t = rig.runner().run_react_decomposer(kQuery, 3);
    CHECK(t.agent == "react_decomposer");
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].sub_instruction ==
          "Retrieve the salary for a Data Scientist.");
    CHECK(t.steps[0].retrieved.size() == 3);
    CHECK(t.steps[1].call.api_name == "TaxCalculator");
    CHECK(t.final_answer == "decomposed");
    CHECK(t.flags.empty());
}

TEST_CASE("global decomposer: one-shot subinstruction plan") {
    Rig rig;
    rig.provider.add_default(
        prompts::kAgentSubinstructionPlan,
        R"({"subinstructions": ["Retrieve the salary for a Data Scientist.",
                                "Calculate the tax for a salary of 150000."]})");
    add_select_call_rules(rig.provider);
    rig.provider.add_default(prompts::kAgentAnswer,
                             R"({"final_answer": "planned and done"})");

    Trajectory t = rig.runner().run_global_decomposer(kQuery);
    CHECK(t.agent == "global_decomposer");
    CHECK(t.plan.size() == 2);
    CHECK(t.executed_names() ==
          std::vector<std::string>{"GetOccupationSalary", "TaxCalculator"});
    CHECK(t.final_answer == "planned and done");

    ScriptedProvider empty_plan;
    empty_plan.add_default(prompts::kAgentSubinstructionPlan,
                           R"({"subinstructions": []})");
    AgentRunner bad(empty_plan, rig.env, rig.corpus, rig.index);
    CHECK_THROWS_AS(bad.run_global_decomposer(kQuery), PlanParseError);
}

TEST_CASE("trajectories round-trip through jsonl") {
    Rig rig;
    rig.provider.add_default(prompts::kAgentReactStep,
                             R"({"finish": {"final_answer": "a"}})");
    std::vector<Trajectory> ts = {rig.runner().run_react(kQuery)};
    const fs::path file =
        fs::temp_directory_path() /
        ("apigraph-traj-" + std::to_string(::getpid()) + ".jsonl");
    write_trajectories(ts, file);
    auto back = read_trajectories(file);
    REQUIRE(back.size() == 1);
    CHECK(canonical_dump(back[0].to_json()) == canonical_dump(ts[0].to_json()));

    std::ofstream(file, std::ios::app) << "{broken\n";
    try {
        read_trajectories(file);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.line == 2);
    }
    fs::remove(file);
}
