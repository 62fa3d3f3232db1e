#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "apigraph/api_spec.hpp"
#include "apigraph/json_util.hpp"
#include "apigraph/provider.hpp"
#include "apigraph/tool_env.hpp"

namespace apigraph {

enum class EdgeStage { Initial, PassedEmbedding, PassedLLM, PassedExecution, Rejected };
enum class FilterStage { Embedding, LLM, Execution };

std::string to_string(EdgeStage s);
EdgeStage edge_stage_from_string(const std::string& s);
std::string to_string(FilterStage s);

/// Typed dependency edge (src, dst, param_index): src's output can fill the
/// param_index-th input of dst. Rejected edges are kept for audit.
struct DependencyEdge {
    std::string src;
    std::string dst;
    int param_index = 0;

    EdgeStage stage = EdgeStage::Initial;
    FilterStage rejected_at = FilterStage::Embedding; // valid when Rejected
    std::string reject_cause;
    double similarity = 0.0;
    bool has_similarity = false;
    std::string justification;

    std::string key() const {
        return src + "->" + dst + "#" + std::to_string(param_index);
    }
    // Survived through the given filter stage (Rejected edges count for the
    // stages they cleared before rejection).
    bool passed(FilterStage s) const;
    bool entered(FilterStage s) const;

    json to_json() const;
    static DependencyEdge from_json(const json& j);
};

struct DependencyGraph {
    std::vector<std::string> nodes;
    std::vector<DependencyEdge> edges;

    std::vector<DependencyEdge> surviving_edges() const;

    json to_json() const;
    static DependencyGraph from_json(const json& j);
    void save(const std::filesystem::path& path) const;
    static DependencyGraph load(const std::filesystem::path& path);
};

// Full multidigraph: for every ordered pair (i, j), i != j, one Initial edge
// per parameter index of j. Self-loops excluded.
DependencyGraph init_full(const SpecMap& specs);

// Keeps edges with cosine(embed(In(dst,k)), embed(Out(src))) >= tau.
DependencyGraph filter_embedding(const DependencyGraph& g, const SpecMap& specs,
                                 Provider& provider, double tau);

// One chat call per surviving edge; survivors carry the generated
// justification.
DependencyGraph filter_llm(const DependencyGraph& g, const Corpus& corpus,
                           const SpecMap& specs, Provider& provider,
                           int workers = 1);

// Grounds each remaining edge in a real execution: instantiate src, run it,
// derive dst's argument from the output, verify the linkage.
DependencyGraph filter_execution(const DependencyGraph& g, const Corpus& corpus,
                                 const SpecMap& specs, Environment& env,
                                 Provider& provider, int workers = 1);

struct StageMetrics {
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;

    json to_json() const;
};

/// Precision/recall per pruning stage against hand labels. Reported under two
/// readings: "cumulative" treats survival through the stage (from the initial
/// edge set) as the positive prediction; "isolated" restricts to edges that
/// entered the stage.
struct StageMetricsReport {
    std::map<std::string, StageMetrics> cumulative;
    std::map<std::string, StageMetrics> isolated;

    json to_json() const;
};

using EdgeLabels = std::map<std::string, bool>; // DependencyEdge::key -> valid

StageMetricsReport stage_metrics(const DependencyGraph& g,
                                 const EdgeLabels& labels);

// JSONL of {src, dst, param_index, valid}.
EdgeLabels load_edge_labels(const std::filesystem::path& path);

} // namespace apigraph
