#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "apigraph/api_spec.hpp"
#include "apigraph/config.hpp"
#include "apigraph/dep_graph.hpp"
#include "apigraph/errors.hpp"

using namespace apigraph;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(APIGRAPH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("apigraph-cli-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

json base_config(const TempDir& dir) {
    return {{"provider", {{"kind", "scripted"}, {"strict_scripts", true}}},
            {"paths",
             {{"corpus", (dir.path / "corpus.jsonl").string()},
              {"manifest", (dir.path / "manifest.json").string()},
              {"out_dir", (dir.path / "out").string()}}},
            {"direct_parse", true},
            {"tau", 0.2}};
}

fs::path write_config(const TempDir& dir, const json& cfg) {
    const fs::path p = dir.path / "config.json";
    std::ofstream(p) << cfg.dump();
    return p;
}

} // namespace

TEST_CASE("config validation names the offending field") {
    auto expect = [](json patch, const std::string& field) {
        json base = {{"provider", {{"kind", "scripted"}}}};
        for (const auto& [k, v] : patch.items()) base[k] = v;
        try {
            PipelineConfig::from_json(base);
            FAIL("expected ConfigError for " << field);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    expect({{"tau", 1.5}}, "tau");
    expect({{"tau", -2.0}}, "tau");
    expect({{"max_nodes", 0}}, "max_nodes");
    expect({{"top_k", 0}}, "top_k");
    expect({{"workers", 0}}, "workers");
    expect({{"env_mode", "weird"}}, "env_mode");
    expect({{"env_mode", "rest"}}, "rest_base_url");
    expect({{"agent", {{"name", "nonsense"}}}}, "agent.name");
    expect({{"agent", {{"max_steps", 0}}}}, "agent.max_steps");
    expect({{"provider", {{"kind", "mystery"}}}}, "provider.kind");
    expect({{"provider", {{"kind", "openai"}}}}, "provider.base_url");
}

TEST_CASE("config defaults and file errors") {
    PipelineConfig c = PipelineConfig::from_json(json::object());
    CHECK(c.tau == doctest::Approx(0.2));
    CHECK(c.max_nodes == 4);
    CHECK(c.top_k == 5);
    CHECK(c.agent.name == "react");
    CHECK(c.env_mode == "sim");
    CHECK_FALSE(c.direct_parse);

    CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/config.json"),
                    ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(json{{"tau", "not a number"}}),
                    ConfigError);

    // Round-trip through to_json preserves every setting.
    PipelineConfig full = PipelineConfig::load("data/config/sim_pipeline.json");
    CHECK(canonical_dump(PipelineConfig::from_json(full.to_json()).to_json()) ==
          canonical_dump(full.to_json()));
}

TEST_CASE("cli exits 2 on configuration errors") {
    TempDir dir;
    json cfg = base_config(dir);
    cfg["tau"] = 1.5;
    fs::path file = write_config(dir, cfg);
    CHECK(run_cli("parse --config " + file.string()) == 2);
    CHECK(run_cli("parse --config /no/such/config.json") == 2);
}

TEST_CASE("cli exits 1 on runtime failures") {
    TempDir dir;
    json cfg = base_config(dir);
    cfg["paths"]["corpus"] = (dir.path / "missing.jsonl").string();
    fs::path file = write_config(dir, cfg);
    CHECK(run_cli("parse --config " + file.string()) == 1);
}

TEST_CASE("a one-function corpus yields an empty graph and exit 0") {
    TempDir dir;
    ApiDocument solo;
    solo.tool = "t";
    solo.name = "Solo";
    solo.description = "the only function";
    solo.parameters = {{"p", "string", true, "a parameter"}};
    solo.output_schema = "some output";
    save_corpus({solo}, dir.path / "corpus.jsonl");
    std::ofstream(dir.path / "manifest.json") << R"({"functions": []})";
    fs::path file = write_config(dir, base_config(dir));

    CHECK(run_cli("parse --config " + file.string()) == 0);
    CHECK(run_cli("graph --config " + file.string()) == 0);
    DependencyGraph g = DependencyGraph::load(dir.path / "out" / "graph.json");
    CHECK(g.nodes == std::vector<std::string>{"Solo"});
    CHECK(g.edges.empty());

    // Sampling the empty graph still succeeds: one singleton task.
    CHECK(run_cli("sample --config " + file.string()) == 0);
    CHECK(fs::exists(dir.path / "out" / "tasks.jsonl"));
}

TEST_CASE("cli flag overrides beat the config file") {
    TempDir dir;
    ApiDocument solo;
    solo.tool = "t";
    solo.name = "Solo";
    solo.description = "the only function";
    solo.parameters = {{"p", "string", true, "a parameter"}};
    solo.output_schema = "some output";
    save_corpus({solo}, dir.path / "corpus.jsonl");
    std::ofstream(dir.path / "manifest.json") << R"({"functions": []})";
    fs::path file = write_config(dir, base_config(dir));

    // An invalid override must fail validation even though the file is fine.
    CHECK(run_cli("parse --config " + file.string() + " --tau 3.0") == 2);
    CHECK(run_cli("parse --config " + file.string() + " --tau 0.5") == 0);
}

TEST_CASE("graph before parse is a runtime error, not a crash") {
    TempDir dir;
    ApiDocument solo;
    solo.tool = "t";
    solo.name = "Solo";
    solo.description = "the only function";
    solo.parameters = {{"p", "string", true, "a parameter"}};
    solo.output_schema = "some output";
    save_corpus({solo}, dir.path / "corpus.jsonl");
    std::ofstream(dir.path / "manifest.json") << R"({"functions": []})";
    fs::path file = write_config(dir, base_config(dir));
    CHECK(run_cli("graph --config " + file.string()) == 1);
}
