#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "apigraph/sampler.hpp"

using namespace apigraph;
namespace fs = std::filesystem;

namespace {

DependencyGraph random_graph(std::mt19937_64& rng, int max_nodes,
                             double edge_prob) {
    DependencyGraph g;
    const int n = 1 + static_cast<int>(rng() % max_nodes);
    for (int i = 0; i < n; ++i) g.nodes.push_back("N" + std::to_string(i));
    for (const auto& a : g.nodes) {
        for (const auto& b : g.nodes) {
            if (a == b) continue;
            for (int k = 0; k < 2; ++k) {
                if (static_cast<double>(rng() % 1000) / 1000.0 < edge_prob) {
                    DependencyEdge e;
                    e.src = a;
                    e.dst = b;
                    e.param_index = k;
                    e.stage = EdgeStage::PassedExecution;
                    g.edges.push_back(e);
                }
            }
        }
    }
    return g;
}

// Brute-force oracle: every node subset of size <= l_max whose induced
// underlying undirected graph is connected.
std::set<std::vector<std::string>> oracle_connected(const DependencyGraph& g,
                                                    int l_max) {
    std::set<std::vector<std::string>> out;
    const size_t n = g.nodes.size();
    for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
        std::vector<std::string> subset;
        for (size_t i = 0; i < n; ++i) {
            if (mask & (size_t{1} << i)) subset.push_back(g.nodes[i]);
        }
        if (subset.size() > static_cast<size_t>(l_max)) continue;
        // BFS over the induced undirected graph.
        std::set<std::string> in(subset.begin(), subset.end());
        std::set<std::string> seen = {subset[0]};
        std::vector<std::string> frontier = {subset[0]};
        while (!frontier.empty()) {
            std::string cur = frontier.back();
            frontier.pop_back();
            for (const auto& e : g.edges) {
                std::string other;
                if (e.src == cur && in.count(e.dst)) other = e.dst;
                else if (e.dst == cur && in.count(e.src)) other = e.src;
                else continue;
                if (seen.insert(other).second) frontier.push_back(other);
            }
        }
        if (seen.size() == subset.size()) {
            std::sort(subset.begin(), subset.end());
            out.insert(subset);
        }
    }
    return out;
}

bool respects_edges(const std::vector<std::string>& order,
                    const std::vector<DependencyEdge>& edges) {
    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& e : edges) {
        if (pos.at(e.src) >= pos.at(e.dst)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("enumeration matches the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 220; ++trial) {
        DependencyGraph g = random_graph(rng, 6, 0.3);
        const int l_max = 1 + static_cast<int>(rng() % 4);
        auto got = enumerate_connected(g, l_max);
        std::set<std::vector<std::string>> got_set(got.begin(), got.end());
        CHECK(got_set.size() == got.size()); // each subset exactly once
        CHECK(got_set == oracle_connected(g, l_max));
    }
}

TEST_CASE("path A-B-C with l_max=4 yields exactly 6 subgraphs") {
    DependencyGraph g;
    g.nodes = {"A", "B", "C"};
    auto edge = [](std::string s, std::string d) {
        DependencyEdge e;
        e.src = std::move(s);
        e.dst = std::move(d);
        e.stage = EdgeStage::PassedExecution;
        return e;
    };
    g.edges = {edge("A", "B"), edge("B", "C")};
    auto subs = enumerate_connected(g, 4);
    CHECK(subs.size() == 6); // {A},{B},{C},{A,B},{B,C},{A,B,C}
    std::set<std::vector<std::string>> expect = {
        {"A"}, {"B"}, {"C"}, {"A", "B"}, {"B", "C"}, {"A", "B", "C"}};
    CHECK(std::set<std::vector<std::string>>(subs.begin(), subs.end()) == expect);
}

TEST_CASE("rejected edges do not contribute to connectivity") {
    DependencyGraph g;
    g.nodes = {"A", "B"};
    DependencyEdge e;
    e.src = "A";
    e.dst = "B";
    e.stage = EdgeStage::Rejected;
    g.edges = {e};
    auto subs = enumerate_connected(g, 2);
    CHECK(subs.size() == 2); // singletons only
}

TEST_CASE("break_cycles yields an acyclic retained set, deterministically") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        DependencyGraph g = random_graph(rng, 5, 0.5);
        std::mt19937_64 r1(trial), r2(trial);
        auto [retained, dropped] = break_cycles(g.nodes, g.edges, r1);
        CHECK(retained.size() + dropped.size() == g.edges.size());
        CHECK_NOTHROW(topo_order(g.nodes, retained));
        // Same seed, same split.
        auto [retained2, dropped2] = break_cycles(g.nodes, g.edges, r2);
        REQUIRE(retained2.size() == retained.size());
        for (size_t i = 0; i < retained.size(); ++i) {
            CHECK(retained[i].key() == retained2[i].key());
        }
    }
}

TEST_CASE("acyclic input passes through break_cycles untouched") {
    DependencyGraph g;
    g.nodes = {"A", "B", "C"};
    DependencyEdge ab, bc;
    ab.src = "A"; ab.dst = "B";
    bc.src = "B"; bc.dst = "C";
    std::mt19937_64 rng(0);
    auto [retained, dropped] = break_cycles(g.nodes, {ab, bc}, rng);
    CHECK(dropped.empty());
    CHECK(retained.size() == 2);
}

TEST_CASE("topo order: validity, lexicographic ties, cycle detection") {
    std::vector<std::string> nodes = {"C", "A", "B"};
    CHECK(topo_order(nodes, {}) == std::vector<std::string>{"A", "B", "C"});

    DependencyEdge ca;
    ca.src = "C";
    ca.dst = "A";
    CHECK(topo_order(nodes, {ca}) == std::vector<std::string>{"B", "C", "A"});

    DependencyEdge ac;
    ac.src = "A";
    ac.dst = "C";
    CHECK_THROWS_AS(topo_order(nodes, {ca, ac}), CycleError);
}

TEST_CASE("sampled tasks respect every retained edge") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        DependencyGraph g = random_graph(rng, 6, 0.4);
        auto tasks = sample_tasks(g, 4, trial);
        for (const auto& t : tasks) {
            CHECK(respects_edges(t.nodes, t.retained_edges));
        }
    }
}

TEST_CASE("sampling is a pure function of (graph, seed)") {
    std::mt19937_64 rng(14);
    DependencyGraph g = random_graph(rng, 6, 0.5);
    auto a = sample_tasks(g, 3, 42);
    auto b = sample_tasks(g, 3, 42);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(canonical_dump(a[i].to_json()) == canonical_dump(b[i].to_json()));
    }
}

TEST_CASE("per-size cap limits subsets of each size") {
    DependencyGraph g;
    g.nodes = {"A", "B", "C"};
    auto edge = [](std::string s, std::string d) {
        DependencyEdge e;
        e.src = std::move(s);
        e.dst = std::move(d);
        return e;
    };
    g.edges = {edge("A", "B"), edge("B", "C")};
    auto capped = sample_tasks(g, 3, 0, 1);
    std::map<size_t, size_t> by_size;
    for (const auto& t : capped) ++by_size[t.nodes.size()];
    for (const auto& [_, count] : by_size) CHECK(count <= 1);
}

TEST_CASE("task files round-trip") {
    DependencyGraph g;
    g.nodes = {"A", "B"};
    DependencyEdge e;
    e.src = "A";
    e.dst = "B";
    g.edges = {e};
    auto tasks = sample_tasks(g, 2, 5);
    const fs::path file = fs::temp_directory_path() / "apigraph-test-tasks.jsonl";
    save_tasks(tasks, file);
    auto back = load_tasks(file);
    REQUIRE(back.size() == tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i) {
        CHECK(canonical_dump(back[i].to_json()) ==
              canonical_dump(tasks[i].to_json()));
    }
    fs::remove(file);
}
