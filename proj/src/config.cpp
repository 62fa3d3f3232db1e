#include "apigraph/config.hpp"

#include <fstream>
#include <set>

#include "apigraph/errors.hpp"

namespace apigraph {

void PipelineConfig::validate() const {
    if (tau < -1.0 || tau > 1.0) {
        throw ConfigError("tau", "must be in [-1, 1]");
    }
    if (max_nodes < 1) throw ConfigError("max_nodes", "must be >= 1");
    if (top_k < 1) throw ConfigError("top_k", "must be >= 1");
    if (workers < 1) throw ConfigError("workers", "must be >= 1");
    static const std::set<std::string> kinds = {"scripted", "openai"};
    if (!kinds.count(provider.kind)) {
        throw ConfigError("provider.kind", "must be 'scripted' or 'openai'");
    }
    if (provider.kind == "openai" && provider.base_url.empty()) {
        throw ConfigError("provider.base_url", "required for openai provider");
    }
    static const std::set<std::string> modes = {"sim", "rest"};
    if (!modes.count(env_mode)) {
        throw ConfigError("env_mode", "must be 'sim' or 'rest'");
    }
    if (env_mode == "rest" && rest_base_url.empty()) {
        throw ConfigError("rest_base_url", "required when env_mode is 'rest'");
    }
    static const std::set<std::string> agents = {
        "react", "global", "react_decomposer", "global_decomposer"};
    if (!agents.count(agent.name)) {
        throw ConfigError("agent.name", "unknown agent '" + agent.name + "'");
    }
    if (agent.max_steps < 1) throw ConfigError("agent.max_steps", "must be >= 1");
}

json PipelineConfig::to_json() const {
    return {{"provider",
             {{"kind", provider.kind},
              {"base_url", provider.base_url},
              {"model", provider.model},
              {"embedding_model", provider.embedding_model},
              {"fixtures", provider.fixtures},
              {"strict_scripts", provider.strict_scripts}}},
            {"paths",
             {{"corpus", paths.corpus},
              {"manifest", paths.manifest},
              {"cache_dir", paths.cache_dir},
              {"out_dir", paths.out_dir},
              {"labels", paths.labels}}},
            {"agent", {{"name", agent.name}, {"max_steps", agent.max_steps}}},
            {"tau", tau},
            {"max_nodes", max_nodes},
            {"top_k", top_k},
            {"seed", seed},
            {"workers", workers},
            {"strict", strict},
            {"direct_parse", direct_parse},
            {"env_mode", env_mode},
            {"rest_base_url", rest_base_url},
            {"per_size_cap", per_size_cap}};
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    try {
        if (j.contains("provider")) {
            const json& p = j.at("provider");
            c.provider.kind = p.value("kind", c.provider.kind);
            c.provider.base_url = p.value("base_url", std::string());
            c.provider.model = p.value("model", std::string());
            c.provider.embedding_model = p.value("embedding_model", std::string());
            c.provider.fixtures = p.value("fixtures", std::string());
            c.provider.strict_scripts = p.value("strict_scripts", true);
        }
        if (j.contains("paths")) {
            const json& p = j.at("paths");
            c.paths.corpus = p.value("corpus", std::string());
            c.paths.manifest = p.value("manifest", std::string());
            c.paths.cache_dir = p.value("cache_dir", std::string());
            c.paths.out_dir = p.value("out_dir", std::string("out"));
            c.paths.labels = p.value("labels", std::string());
        }
        if (j.contains("agent")) {
            const json& a = j.at("agent");
            c.agent.name = a.value("name", c.agent.name);
            c.agent.max_steps = a.value("max_steps", c.agent.max_steps);
        }
        c.tau = j.value("tau", c.tau);
        c.max_nodes = j.value("max_nodes", c.max_nodes);
        c.top_k = j.value("top_k", c.top_k);
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        c.strict = j.value("strict", c.strict);
        c.direct_parse = j.value("direct_parse", c.direct_parse);
        c.env_mode = j.value("env_mode", c.env_mode);
        c.rest_base_url = j.value("rest_base_url", std::string());
        c.per_size_cap = j.value("per_size_cap", c.per_size_cap);
    } catch (const json::exception& e) {
        throw ConfigError("<root>", e.what());
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError("<file>", "not a JSON object: " + path.string());
    }
    return from_json(j);
}

} // namespace apigraph
