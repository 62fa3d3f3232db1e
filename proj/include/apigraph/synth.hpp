#pragma once

#include <string>
#include <variant>
#include <vector>

#include "apigraph/api_spec.hpp"
#include "apigraph/provider.hpp"
#include "apigraph/sampler.hpp"
#include "apigraph/tool_env.hpp"

namespace apigraph {

/// One executed step: sub-query text, the call, and its output.
struct CallUnit {
    std::string sub_query;
    ApiCall call;
    ApiOutput output;

    json to_json() const;
    static CallUnit from_json(const json& j);
};

/// A synthesized goal-oriented sample. The user query is generated only after
/// every call unit exists; provenance records the task seed and the chat
/// request digests in issue order so that ordering is checkable.
struct TaskSample {
    std::string query;
    std::vector<CallUnit> units;
    std::string final_response;
    std::vector<std::string> gold_path;
    std::uint64_t seed = 0;
    std::vector<json> request_digests; // [{prompt_id, digest}] in issue order

    json to_json() const;
    static TaskSample from_json(const json& j);
};

struct Aborted {
    std::string node;  // empty when the failure is not tied to one node
    std::string cause; // e.g. "exec", "extraction", "missing-required", "leak"
};

using SynthResult = std::variant<TaskSample, Aborted>;

/// Call-first sample synthesis over one subgraph task: instantiate and execute
/// each API in order, generate sub-queries, then summarize into a user query
/// and compose the final response.
class Synthesizer {
public:
    Synthesizer(Provider& provider, Environment& env, const Corpus& corpus)
        : provider_(provider), env_(env), corpus_(corpus) {}

    // Aborts on the first failing step; retry_budget extra attempts for the
    // whole sample (default 1).
    SynthResult synth_sample(const SubgraphTask& task, int retry_budget = 1);

    // Individual steps, exposed for direct testing.
    ApiCall fill_arguments(const std::string& node, const SubgraphTask& task,
                           const std::vector<CallUnit>& history);
    std::string gen_subquery(const ApiCall& call, const ApiOutput& output,
                             const ApiDocument& doc,
                             const std::vector<CallUnit>& history);
    std::string gen_user_query(const std::vector<std::string>& subqueries);
    std::string gen_final_response(const std::string& query,
                                   const std::vector<CallUnit>& units);

private:
    SynthResult synth_once(const SubgraphTask& task);
    json ask(const ChatRequest& request);

    Provider& provider_;
    Environment& env_;
    const Corpus& corpus_;
    std::vector<json> digests_;
};

} // namespace apigraph
