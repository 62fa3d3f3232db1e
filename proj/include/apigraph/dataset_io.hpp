#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apigraph/api_spec.hpp"
#include "apigraph/synth.hpp"

namespace apigraph {

/// Canonical on-disk sample schema: query, api_path, final_response.
struct SampleRecord {
    struct Step {
        std::string api_name;
        json input;
        json output; // canonical envelope {error, response}
        std::string sub_instruction;
    };
    std::string query;
    std::vector<Step> api_path;
    std::string final_response;
    json extra = json::object(); // unknown fields preserved in lenient mode

    json to_json() const;
    static SampleRecord from_json(const json& j, bool strict);
};

SampleRecord to_record(const TaskSample& sample);
std::vector<std::string> gold_path(const SampleRecord& record);

void write_samples(const std::vector<SampleRecord>& samples,
                   const std::filesystem::path& path);
// strict: unknown fields and the legacy "subinstruction" spelling rejected;
// lenient: unknowns preserved, spelling normalized to sub_instruction.
std::vector<SampleRecord> read_samples(const std::filesystem::path& path,
                                       bool strict = false);

/// SFT example: prompt (query + doc context), serialized target, and
/// character spans over the target covering every argument value.
struct SftRecord {
    std::string prompt;
    std::string target;
    std::vector<std::pair<size_t, size_t>> mask_spans; // [start, end)

    json to_json() const;
};

std::vector<SftRecord> export_sft(const std::vector<SampleRecord>& samples,
                                  const Corpus& corpus);
void write_sft(const std::vector<SftRecord>& records,
               const std::filesystem::path& path);

struct RetrieverPair {
    std::string query;
    std::string positive_doc_id;

    json to_json() const {
        return {{"query", query}, {"positive_doc_id", positive_doc_id}};
    }
};

std::vector<RetrieverPair> export_retriever_pairs(
    const std::vector<SampleRecord>& samples);
void write_retriever_pairs(const std::vector<RetrieverPair>& pairs,
                           const std::filesystem::path& path);

} // namespace apigraph
