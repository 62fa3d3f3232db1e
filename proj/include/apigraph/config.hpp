#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "apigraph/json_util.hpp"

namespace apigraph {

struct ProviderConfig {
    std::string kind = "scripted"; // "scripted" | "openai"
    std::string base_url;
    std::string model;
    std::string embedding_model;
    std::string fixtures; // scripted: rule/fixture JSONL
    bool strict_scripts = true;
};

struct PathsConfig {
    std::string corpus;
    std::string manifest;  // sim environment manifest
    std::string cache_dir; // empty disables the response cache
    std::string out_dir = "out";
    std::string labels; // optional edge labels for stage metrics
};

struct AgentConfig {
    std::string name = "react"; // react | global | react_decomposer |
                                // global_decomposer
    int max_steps = 10;
};

struct PipelineConfig {
    ProviderConfig provider;
    PathsConfig paths;
    AgentConfig agent;
    double tau = 0.2;
    int max_nodes = 4; // L_max
    int top_k = 5;
    std::uint64_t seed = 0;
    int workers = 1;
    bool strict = false;       // strict dataset schema reading
    bool direct_parse = false; // parse specs from doc fields, no provider
    std::string env_mode = "sim"; // "sim" | "rest"
    std::string rest_base_url;
    size_t per_size_cap = 0;

    // Throws ConfigError naming the offending field path.
    void validate() const;

    json to_json() const;
    static PipelineConfig from_json(const json& j);
    static PipelineConfig load(const std::filesystem::path& path);
};

} // namespace apigraph
