#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apigraph/api_spec.hpp"
#include "apigraph/provider.hpp"
#include "apigraph/retriever.hpp"
#include "apigraph/tool_env.hpp"

namespace apigraph {

/// One agent step: the call attempted (or skipped), its output, retrieval
/// context, and any error flags. Skipped steps have executed=false.
struct AgentStep {
    std::string sub_instruction;        // decomposer variants only
    std::vector<std::string> retrieved; // per-step retrieval (decomposers)
    ApiCall call;
    ApiOutput output;
    bool executed = false;
    std::vector<std::string> flags; // e.g. "UnknownFunction", "ArgError"

    json to_json() const;
    static AgentStep from_json(const json& j);
};

struct Trajectory {
    std::string agent;
    std::string query;
    std::vector<std::string> retrieved; // query-level top-k (non-decomposers)
    std::vector<std::string> plan;      // one-shot plan (Global variants)
    std::vector<AgentStep> steps;
    std::string final_answer;
    std::vector<std::string> flags; // e.g. "StepLimitReached"

    std::vector<std::string> executed_names() const;

    json to_json() const;
    static Trajectory from_json(const json& j);
};

/// The four prompting baselines, run against any environment + retriever.
/// A single trajectory is sequential; distinct queries may run concurrently
/// on separate AgentRunner instances or via the thread-safe provider.
class AgentRunner {
public:
    AgentRunner(Provider& provider, Environment& env, const Corpus& corpus,
                const DocIndex& index)
        : provider_(provider), env_(env), corpus_(corpus), index_(index) {}

    // One-shot function-sequence plan, then iterative argument generation.
    // Never executes a function absent from the plan.
    Trajectory run_global(const std::string& query, size_t k = 5);

    // Step loop: jointly select the next API (with args) or finish.
    Trajectory run_react(const std::string& query, size_t k = 5,
                         int max_steps = 10);

    // One subinstruction at a time, each with its own retrieval + call.
    Trajectory run_react_decomposer(const std::string& query, size_t k = 5,
                                    int max_steps = 10);

    // One-shot subinstruction plan, then per-subinstruction retrieval + call.
    Trajectory run_global_decomposer(const std::string& query, size_t k = 5);

private:
    std::vector<std::string> retrieve(const std::string& text, size_t k);
    json docs_payload(const std::vector<std::string>& ids) const;
    static json history_payload(const std::vector<AgentStep>& steps);
    void execute_step(Trajectory& traj, AgentStep step);
    // Parses {"action": {api_name, input}}; flags malformed shapes.
    static bool parse_action(const json& reply, AgentStep& step);
    std::string compose_answer(const std::string& query,
                               const std::vector<AgentStep>& steps);

    Provider& provider_;
    Environment& env_;
    const Corpus& corpus_;
    const DocIndex& index_;
};

void write_trajectories(const std::vector<Trajectory>& trajectories,
                        const std::filesystem::path& path);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

} // namespace apigraph
