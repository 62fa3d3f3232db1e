#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apigraph/agent.hpp"
#include "apigraph/dataset_io.hpp"
#include "apigraph/provider.hpp"
#include "apigraph/tool_env.hpp"

namespace apigraph {

// Jaccard similarity of called-function name sets; 1.0 when both are empty.
double selection_accuracy(const std::set<std::string>& pred,
                          const std::set<std::string>& gold);

// Jaccard over (name, canonicalized argument map) pairs. Numeric values
// compare numerically (150000 == 150000.0); argument order is irrelevant.
double invocation_accuracy(const std::vector<ApiCall>& pred,
                           const std::vector<ApiCall>& gold);

// True iff gold is a (not necessarily contiguous) subsequence of pred.
bool correct_path(const std::vector<std::string>& gold,
                  const std::vector<std::string>& pred);

// Mean of pred_len - gold_len over successful cases; nullopt when none.
std::optional<double> delta_solution_length(
    const std::vector<std::pair<size_t, size_t>>& successes);

// LCS-based F1 over whitespace tokens.
double rouge_l(const std::string& pred, const std::string& gold);

// Fraction of predicted outputs equal (JSON, numeric-aware) to some unmatched
// gold output under greedy one-to-one matching.
double correctness(const std::vector<ApiOutput>& pred,
                   const std::vector<ApiOutput>& gold);

enum class Verdict { Solved, Unsolved };

// Sends the stored judge template verbatim; any answer_status other than
// "Solved"/"Unsolved" (including "Unsure") is rejected, with one retry before
// JudgeFormatError.
Verdict success_rate(const std::string& query, const json& execution_details,
                     const std::string& answer, Provider& judge_provider);

struct SampleMetrics {
    std::string query;
    double sa = 0.0;
    double ia = 0.0;
    bool cp = false;
    double rouge = 0.0;
    double correct = 0.0;
    std::optional<Verdict> verdict; // absent when no judge configured
    size_t pred_len = 0;
    size_t gold_len = 0;

    json to_json() const;
};

struct MetricReport {
    double sa = 0.0;
    double ia = 0.0;
    double cp_rate = 0.0;
    double rouge = 0.0;
    double correct = 0.0;
    std::optional<double> delta_len; // over judged-Solved cases only
    size_t solved = 0;
    size_t unsolved = 0;
    std::vector<SampleMetrics> samples;

    json to_json() const;
    std::string to_table() const;
};

// Pairs trajectories with gold samples by position; sizes must match.
// judge_provider may be null to skip SR judging.
MetricReport evaluate(const std::vector<Trajectory>& trajectories,
                      const std::vector<SampleRecord>& gold,
                      Provider* judge_provider = nullptr);

} // namespace apigraph
