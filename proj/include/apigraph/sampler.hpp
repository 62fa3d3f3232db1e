#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "apigraph/dep_graph.hpp"

namespace apigraph {

/// One sampled task: a dependency-respecting execution order over a connected
/// subgraph, with the edges dropped to break cycles and the RNG seed used, so
/// the sample is exactly replayable.
struct SubgraphTask {
    std::vector<std::string> nodes; // execution order
    std::vector<DependencyEdge> retained_edges;
    std::vector<DependencyEdge> dropped_edges;
    std::uint64_t seed = 0;

    json to_json() const;
    static SubgraphTask from_json(const json& j);
};

// All node subsets of size <= l_max whose induced underlying undirected graph
// is connected, each exactly once, in deterministic sorted order. Operates on
// the graph's surviving (non-rejected) edges.
std::vector<std::vector<std::string>> enumerate_connected(
    const DependencyGraph& g, int l_max);

// Removes uniformly-random edges from detected directed cycles until the
// retained set is acyclic. Identical seed, identical result. Acyclic input is
// returned untouched.
std::pair<std::vector<DependencyEdge>, std::vector<DependencyEdge>> break_cycles(
    const std::vector<std::string>& nodes,
    const std::vector<DependencyEdge>& edges, std::mt19937_64& rng);

// Kahn's ordering; ties among ready nodes broken lexicographically. Throws
// CycleError if the edge set is cyclic.
std::vector<std::string> topo_order(const std::vector<std::string>& nodes,
                                    const std::vector<DependencyEdge>& retained);

// Full sampling pass: enumerate, break cycles (seeded per task from the base
// seed plus the node set), topo-sort. per_size_cap limits how many subsets of
// each size are kept (0 = unlimited), taken in deterministic order.
std::vector<SubgraphTask> sample_tasks(const DependencyGraph& g, int l_max,
                                       std::uint64_t seed,
                                       size_t per_size_cap = 0);

void save_tasks(const std::vector<SubgraphTask>& tasks,
                const std::filesystem::path& path);
std::vector<SubgraphTask> load_tasks(const std::filesystem::path& path);

} // namespace apigraph
