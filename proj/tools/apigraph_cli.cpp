#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "apigraph/agent.hpp"
#include "apigraph/api_spec.hpp"
#include "apigraph/config.hpp"
#include "apigraph/dataset_io.hpp"
#include "apigraph/dep_graph.hpp"
#include "apigraph/errors.hpp"
#include "apigraph/eval.hpp"
#include "apigraph/retriever.hpp"
#include "apigraph/sampler.hpp"
#include "apigraph/synth.hpp"
#include "apigraph/tool_env.hpp"

namespace fs = std::filesystem;
using namespace apigraph;

namespace {

std::shared_ptr<Provider> make_provider(const PipelineConfig& cfg) {
    std::shared_ptr<Provider> inner;
    if (cfg.provider.kind == "scripted") {
        auto scripted = std::make_shared<ScriptedProvider>(
            cfg.provider.strict_scripts);
        if (!cfg.provider.fixtures.empty()) {
            scripted->load_fixtures(cfg.provider.fixtures);
        }
        inner = scripted;
    } else {
        inner = std::make_shared<HttpChatProvider>(cfg.provider.base_url,
                                                   cfg.provider.model,
                                                   cfg.provider.embedding_model);
    }
    if (cfg.paths.cache_dir.empty()) return inner;
    auto cache = std::make_shared<ResponseCache>(cfg.paths.cache_dir);
    return std::make_shared<CachingProvider>(inner, cache);
}

std::unique_ptr<Environment> make_env(const PipelineConfig& cfg) {
    if (cfg.env_mode == "rest") {
        return std::make_unique<RestExecutor>(cfg.rest_base_url);
    }
    if (cfg.paths.manifest.empty()) {
        throw ConfigError("paths.manifest", "required when env_mode is 'sim'");
    }
    return std::make_unique<SimEnvironment>(
        SimEnvironment::from_manifest(cfg.paths.manifest));
}

fs::path out_path(const PipelineConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.paths.out_dir);
    return fs::path(cfg.paths.out_dir) / name;
}

SpecMap load_specs(const PipelineConfig& cfg) {
    const fs::path path = fs::path(cfg.paths.out_dir) / "specs.json";
    std::ifstream in(path);
    if (!in) throw Error("missing parse output: " + path.string() +
                         " (run the parse command first)");
    json j = json::parse(in);
    SpecMap specs;
    for (const auto& [name, spec] : j.items()) {
        specs[name] = ParsedSpec::from_json(spec);
    }
    return specs;
}

int cmd_parse(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    auto provider = make_provider(cfg);
    SpecParser parser(*provider, cfg.direct_parse);
    SpecMap specs = parser.parse_corpus(corpus, cfg.workers);
    json j = json::object();
    for (const auto& [name, spec] : specs) j[name] = spec.to_json();
    std::ofstream out(out_path(cfg, "specs.json"));
    out << canonical_dump(j) << "\n";
    std::cout << "parsed " << specs.size() << " documents\n";
    return 0;
}

int cmd_graph(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    SpecMap specs = load_specs(cfg);
    auto provider = make_provider(cfg);
    auto env = make_env(cfg);

    DependencyGraph g = init_full(specs);
    g = filter_embedding(g, specs, *provider, cfg.tau);
    g = filter_llm(g, corpus, specs, *provider, cfg.workers);
    g = filter_execution(g, corpus, specs, *env, *provider, cfg.workers);
    g.save(out_path(cfg, "graph.json"));

    if (!cfg.paths.labels.empty()) {
        EdgeLabels labels = load_edge_labels(cfg.paths.labels);
        std::ofstream out(out_path(cfg, "stage_metrics.json"));
        out << canonical_dump(stage_metrics(g, labels).to_json()) << "\n";
    }
    std::cout << "graph: " << g.nodes.size() << " nodes, "
              << g.surviving_edges().size() << " surviving edges ("
              << g.edges.size() << " audited)\n";
    return 0;
}

int cmd_sample(const PipelineConfig& cfg) {
    DependencyGraph g =
        DependencyGraph::load(fs::path(cfg.paths.out_dir) / "graph.json");
    auto tasks = sample_tasks(g, cfg.max_nodes, cfg.seed, cfg.per_size_cap);
    save_tasks(tasks, out_path(cfg, "tasks.jsonl"));
    std::cout << "sampled " << tasks.size() << " subgraph tasks\n";
    return 0;
}

int cmd_synth(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    auto tasks = load_tasks(fs::path(cfg.paths.out_dir) / "tasks.jsonl");
    auto provider = make_provider(cfg);
    auto env = make_env(cfg);
    Synthesizer synth(*provider, *env, corpus);

    std::vector<TaskSample> ok;
    size_t aborted = 0;
    for (const auto& task : tasks) {
        SynthResult r = synth.synth_sample(task);
        if (std::holds_alternative<TaskSample>(r)) {
            ok.push_back(std::get<TaskSample>(std::move(r)));
        } else {
            ++aborted;
        }
    }
    {
        std::ofstream out(out_path(cfg, "task_samples.jsonl"));
        for (const auto& s : ok) out << canonical_dump(s.to_json()) << "\n";
    }
    std::vector<SampleRecord> records;
    for (const auto& s : ok) records.push_back(to_record(s));
    write_samples(records, out_path(cfg, "samples.jsonl"));
    std::cout << "synthesized " << ok.size() << " samples (" << aborted
              << " aborted)\n";
    return 0;
}

int cmd_export(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    auto samples =
        read_samples(fs::path(cfg.paths.out_dir) / "samples.jsonl", cfg.strict);
    write_sft(export_sft(samples, corpus), out_path(cfg, "sft.jsonl"));
    write_retriever_pairs(export_retriever_pairs(samples),
                          out_path(cfg, "retriever_pairs.jsonl"));
    std::cout << "exported " << samples.size() << " samples\n";
    return 0;
}

int cmd_retrieve_eval(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    auto samples =
        read_samples(fs::path(cfg.paths.out_dir) / "samples.jsonl", cfg.strict);
    auto provider = make_provider(cfg);
    DocIndex index = build_index(corpus, *provider);
    index.save(out_path(cfg, "index"));
    RecallReport report = recall_eval(index, *provider, samples);
    std::ofstream out(out_path(cfg, "retrieval_report.json"));
    out << canonical_dump(report.to_json()) << "\n";
    std::cout << canonical_dump(report.to_json()) << "\n";
    return 0;
}

int cmd_agent(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(cfg.paths.corpus);
    auto samples =
        read_samples(fs::path(cfg.paths.out_dir) / "samples.jsonl", cfg.strict);
    auto provider = make_provider(cfg);
    auto env = make_env(cfg);
    DocIndex index = build_index(corpus, *provider);
    AgentRunner runner(*provider, *env, corpus, index);

    std::vector<Trajectory> trajectories;
    for (const auto& rec : samples) {
        const size_t k = static_cast<size_t>(cfg.top_k);
        if (cfg.agent.name == "global") {
            trajectories.push_back(runner.run_global(rec.query, k));
        } else if (cfg.agent.name == "react") {
            trajectories.push_back(
                runner.run_react(rec.query, k, cfg.agent.max_steps));
        } else if (cfg.agent.name == "react_decomposer") {
            trajectories.push_back(
                runner.run_react_decomposer(rec.query, k, cfg.agent.max_steps));
        } else {
            trajectories.push_back(runner.run_global_decomposer(rec.query, k));
        }
    }
    write_trajectories(trajectories, out_path(cfg, "trajectories.jsonl"));
    std::cout << "ran " << trajectories.size() << " trajectories with agent '"
              << cfg.agent.name << "'\n";
    return 0;
}

int cmd_eval(const PipelineConfig& cfg, bool with_judge) {
    auto samples =
        read_samples(fs::path(cfg.paths.out_dir) / "samples.jsonl", cfg.strict);
    auto trajectories =
        read_trajectories(fs::path(cfg.paths.out_dir) / "trajectories.jsonl");
    std::shared_ptr<Provider> judge;
    if (with_judge) judge = make_provider(cfg);
    MetricReport report = evaluate(trajectories, samples, judge.get());
    std::ofstream out(out_path(cfg, "report.json"));
    out << canonical_dump(report.to_json()) << "\n";
    std::cout << report.to_table();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"API dependency graph pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "pipeline config JSON")->required();

    // Optional overrides of config values.
    std::optional<std::uint64_t> seed;
    std::optional<double> tau;
    std::optional<int> max_nodes, top_k, workers;
    bool strict_flag = false;
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--tau", tau, "embedding similarity threshold");
    app.add_option("--max-nodes", max_nodes, "max subgraph size (L_max)");
    app.add_option("--top-k", top_k, "retrieval depth");
    app.add_option("--workers", workers, "worker thread count");
    app.add_flag("--strict", strict_flag, "strict dataset schema reading");

    auto* parse = app.add_subcommand("parse", "extract semantic descriptions");
    auto* graph = app.add_subcommand("graph", "build + filter dependency graph");
    auto* sample = app.add_subcommand("sample", "enumerate subgraph tasks");
    auto* synth = app.add_subcommand("synth", "synthesize task samples");
    auto* exp = app.add_subcommand("export", "export SFT + retriever data");
    auto* retrieve =
        app.add_subcommand("retrieve-eval", "build index + recall eval");
    auto* agent = app.add_subcommand("agent", "run a prompting baseline");
    auto* eval_cmd = app.add_subcommand("eval", "score trajectories");
    bool with_judge = false;
    eval_cmd->add_flag("--judge", with_judge, "run the success-rate judge");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = PipelineConfig::load(config_path);
        if (seed) cfg.seed = *seed;
        if (tau) cfg.tau = *tau;
        if (max_nodes) cfg.max_nodes = *max_nodes;
        if (top_k) cfg.top_k = *top_k;
        if (workers) cfg.workers = *workers;
        if (strict_flag) cfg.strict = true;
        cfg.validate();

        if (parse->parsed()) return cmd_parse(cfg);
        if (graph->parsed()) return cmd_graph(cfg);
        if (sample->parsed()) return cmd_sample(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        if (exp->parsed()) return cmd_export(cfg);
        if (retrieve->parsed()) return cmd_retrieve_eval(cfg);
        if (agent->parsed()) return cmd_agent(cfg);
        if (eval_cmd->parsed()) return cmd_eval(cfg, with_judge);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
