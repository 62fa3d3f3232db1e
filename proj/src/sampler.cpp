#include "apigraph/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "apigraph/errors.hpp"

namespace apigraph {

json SubgraphTask::to_json() const {
    json retained = json::array(), dropped = json::array();
    for (const auto& e : retained_edges) retained.push_back(e.to_json());
    for (const auto& e : dropped_edges) dropped.push_back(e.to_json());
    return {{"nodes", nodes},
            {"retained_edges", retained},
            {"dropped_edges", dropped},
            {"seed", seed}};
}

SubgraphTask SubgraphTask::from_json(const json& j) {
    SubgraphTask t;
    t.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("retained_edges")) {
        t.retained_edges.push_back(DependencyEdge::from_json(e));
    }
    for (const auto& e : j.at("dropped_edges")) {
        t.dropped_edges.push_back(DependencyEdge::from_json(e));
    }
    t.seed = j.at("seed").get<std::uint64_t>();
    return t;
}

std::vector<std::vector<std::string>> enumerate_connected(
    const DependencyGraph& g, int l_max) {
    if (l_max < 1) throw Error("l_max must be >= 1");
    std::vector<std::string> nodes = g.nodes;
    std::sort(nodes.begin(), nodes.end());
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;

    // Undirected adjacency over surviving edges.
    std::vector<std::set<size_t>> adj(nodes.size());
    for (const auto& e : g.surviving_edges()) {
        const size_t a = index.at(e.src), b = index.at(e.dst);
        adj[a].insert(b);
        adj[b].insert(a);
    }

    std::vector<std::vector<std::string>> out;
    std::vector<size_t> sub;
    auto emit = [&] {
        std::vector<std::string> names;
        for (size_t i : sub) names.push_back(nodes[i]);
        std::sort(names.begin(), names.end());
        out.push_back(std::move(names));
    };

    // ESU-style extension: each connected subset is produced exactly once,
    // anchored at its minimum-index node.
    std::function<void(size_t, std::vector<size_t>, std::set<size_t>)> extend =
        [&](size_t anchor, std::vector<size_t> ext, std::set<size_t> excluded) {
            while (!ext.empty()) {
                const size_t w = ext.front();
                ext.erase(ext.begin());
                sub.push_back(w);
                emit();
                if (sub.size() < static_cast<size_t>(l_max)) {
                    std::vector<size_t> next_ext = ext;
                    std::set<size_t> next_excluded = excluded;
                    for (size_t i : ext) next_excluded.insert(i);
                    for (size_t u : adj[w]) {
                        if (u <= anchor) continue;
                        if (next_excluded.count(u)) continue;
                        if (std::find(sub.begin(), sub.end(), u) != sub.end()) continue;
                        next_ext.push_back(u);
                        next_excluded.insert(u);
                    }
                    std::sort(next_ext.begin(), next_ext.end());
                    extend(anchor, std::move(next_ext), next_excluded);
                }
                sub.pop_back();
                excluded.insert(w);
            }
        };

    for (size_t v = 0; v < nodes.size(); ++v) {
        sub = {v};
        emit();
        if (l_max > 1) {
            std::vector<size_t> ext;
            std::set<size_t> excluded = {v};
            for (size_t u : adj[v]) {
                if (u > v) {
                    ext.push_back(u);
                    excluded.insert(u);
                }
            }
            std::sort(ext.begin(), ext.end());
            extend(v, std::move(ext), std::move(excluded));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

namespace {

// Returns the node sequence of one directed cycle, or empty when acyclic.
std::vector<std::string> find_cycle(
    const std::vector<std::string>& nodes,
    const std::vector<DependencyEdge>& edges) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& e : edges) succ[e.src].push_back(e.dst);
    std::map<std::string, int> color; // 0 white, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::vector<std::string> cycle;

    std::function<bool(const std::string&)> dfs = [&](const std::string& u) {
        color[u] = 1;
        stack.push_back(u);
        for (const auto& v : succ[u]) {
            if (color[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                cycle.assign(it, stack.end());
                return true;
            }
            if (color[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        color[u] = 2;
        return false;
    };
    for (const auto& n : nodes) {
        if (color[n] == 0 && dfs(n)) return cycle;
    }
    return {};
}

} // namespace

std::pair<std::vector<DependencyEdge>, std::vector<DependencyEdge>> break_cycles(
    const std::vector<std::string>& nodes,
    const std::vector<DependencyEdge>& edges, std::mt19937_64& rng) {
    std::vector<DependencyEdge> retained = edges;
    std::vector<DependencyEdge> dropped;
    for (;;) {
        const std::vector<std::string> cycle = find_cycle(nodes, retained);
        if (cycle.empty()) break;
        // Candidate edges: every retained edge lying on the cycle.
        std::vector<size_t> candidates;
        for (size_t i = 0; i < retained.size(); ++i) {
            for (size_t c = 0; c < cycle.size(); ++c) {
                const std::string& a = cycle[c];
                const std::string& b = cycle[(c + 1) % cycle.size()];
                if (retained[i].src == a && retained[i].dst == b) {
                    candidates.push_back(i);
                    break;
                }
            }
        }
        const size_t pick = candidates[rng() % candidates.size()];
        dropped.push_back(retained[pick]);
        retained.erase(retained.begin() + static_cast<long>(pick));
    }
    return {retained, dropped};
}

std::vector<std::string> topo_order(
    const std::vector<std::string>& nodes,
    const std::vector<DependencyEdge>& retained) {
    std::map<std::string, int> indegree;
    for (const auto& n : nodes) indegree[n] = 0;
    for (const auto& e : retained) ++indegree[e.dst];

    std::set<std::string> ready; // ordered: lexicographic tie-break
    for (const auto& [n, d] : indegree) {
        if (d == 0) ready.insert(n);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        const std::string n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (const auto& e : retained) {
            if (e.src == n && --indegree[e.dst] == 0) ready.insert(e.dst);
        }
    }
    if (order.size() != nodes.size()) {
        throw CycleError("cycle remains in retained edge set");
    }
    return order;
}

namespace {

std::uint64_t task_seed(std::uint64_t base,
                        const std::vector<std::string>& nodes) {
    std::uint64_t h = 1469598103934665603ull ^ base;
    for (const auto& n : nodes) {
        for (unsigned char c : n) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '|';
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::vector<SubgraphTask> sample_tasks(const DependencyGraph& g, int l_max,
                                       std::uint64_t seed,
                                       size_t per_size_cap) {
    std::vector<SubgraphTask> tasks;
    std::map<size_t, size_t> taken_per_size;
    for (const auto& subset : enumerate_connected(g, l_max)) {
        if (per_size_cap > 0 && taken_per_size[subset.size()] >= per_size_cap) {
            continue;
        }
        ++taken_per_size[subset.size()];
        std::set<std::string> members(subset.begin(), subset.end());
        std::vector<DependencyEdge> induced;
        for (const auto& e : g.surviving_edges()) {
            if (members.count(e.src) && members.count(e.dst)) induced.push_back(e);
        }
        SubgraphTask task;
        task.seed = task_seed(seed, subset);
        std::mt19937_64 rng(task.seed);
        auto [retained, dropped] = break_cycles(subset, induced, rng);
        task.retained_edges = std::move(retained);
        task.dropped_edges = std::move(dropped);
        task.nodes = topo_order(subset, task.retained_edges);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

void save_tasks(const std::vector<SubgraphTask>& tasks,
                const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write tasks: " + path.string());
    for (const auto& t : tasks) out << canonical_dump(t.to_json()) << "\n";
}

std::vector<SubgraphTask> load_tasks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open tasks: " + path.string());
    std::vector<SubgraphTask> tasks;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("invalid task record", line_no);
        tasks.push_back(SubgraphTask::from_json(j));
    }
    return tasks;
}

} // namespace apigraph
