#include "apigraph/dep_graph.hpp"

#include <fstream>

#include "apigraph/errors.hpp"
#include "apigraph/parallel.hpp"
#include "apigraph/prompts.hpp"

namespace apigraph {

std::string to_string(EdgeStage s) {
    switch (s) {
        case EdgeStage::Initial: return "initial";
        case EdgeStage::PassedEmbedding: return "passed_embedding";
        case EdgeStage::PassedLLM: return "passed_llm";
        case EdgeStage::PassedExecution: return "passed_execution";
        case EdgeStage::Rejected: return "rejected";
    }
    return "initial";
}

EdgeStage edge_stage_from_string(const std::string& s) {
    if (s == "initial") return EdgeStage::Initial;
    if (s == "passed_embedding") return EdgeStage::PassedEmbedding;
    if (s == "passed_llm") return EdgeStage::PassedLLM;
    if (s == "passed_execution") return EdgeStage::PassedExecution;
    if (s == "rejected") return EdgeStage::Rejected;
    throw SchemaError("unknown edge stage: " + s);
}

std::string to_string(FilterStage s) {
    switch (s) {
        case FilterStage::Embedding: return "embedding";
        case FilterStage::LLM: return "llm";
        case FilterStage::Execution: return "execution";
    }
    return "embedding";
}

namespace {

FilterStage filter_stage_from_string(const std::string& s) {
    if (s == "embedding") return FilterStage::Embedding;
    if (s == "llm") return FilterStage::LLM;
    if (s == "execution") return FilterStage::Execution;
    throw SchemaError("unknown filter stage: " + s);
}

int stage_rank(FilterStage s) { return static_cast<int>(s); }

} // namespace

bool DependencyEdge::passed(FilterStage s) const {
    switch (stage) {
        case EdgeStage::Initial: return false;
        case EdgeStage::PassedEmbedding:
            return stage_rank(s) <= stage_rank(FilterStage::Embedding);
        case EdgeStage::PassedLLM:
            return stage_rank(s) <= stage_rank(FilterStage::LLM);
        case EdgeStage::PassedExecution: return true;
        case EdgeStage::Rejected:
            return stage_rank(s) < stage_rank(rejected_at);
    }
    return false;
}

bool DependencyEdge::entered(FilterStage s) const {
    if (s == FilterStage::Embedding) return true;
    return passed(static_cast<FilterStage>(stage_rank(s) - 1));
}

json DependencyEdge::to_json() const {
    json j = {{"src", src},
              {"dst", dst},
              {"param_index", param_index},
              {"stage", to_string(stage)},
              {"similarity", has_similarity ? json(similarity) : json()},
              {"justification", justification}};
    if (stage == EdgeStage::Rejected) {
        j["rejected_at"] = to_string(rejected_at);
        j["reject_cause"] = reject_cause;
    }
    return j;
}

DependencyEdge DependencyEdge::from_json(const json& j) {
    DependencyEdge e;
    e.src = j.at("src").get<std::string>();
    e.dst = j.at("dst").get<std::string>();
    e.param_index = j.at("param_index").get<int>();
    e.stage = edge_stage_from_string(j.at("stage").get<std::string>());
    if (j.contains("similarity") && !j.at("similarity").is_null()) {
        e.similarity = j.at("similarity").get<double>();
        e.has_similarity = true;
    }
    e.justification = j.value("justification", "");
    if (e.stage == EdgeStage::Rejected) {
        e.rejected_at = filter_stage_from_string(j.at("rejected_at").get<std::string>());
        e.reject_cause = j.value("reject_cause", "");
    }
    return e;
}

std::vector<DependencyEdge> DependencyGraph::surviving_edges() const {
    std::vector<DependencyEdge> out;
    for (const auto& e : edges) {
        if (e.stage != EdgeStage::Rejected) out.push_back(e);
    }
    return out;
}

json DependencyGraph::to_json() const {
    json es = json::array();
    for (const auto& e : edges) es.push_back(e.to_json());
    return {{"nodes", nodes}, {"edges", es}};
}

DependencyGraph DependencyGraph::from_json(const json& j) {
    DependencyGraph g;
    g.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) {
        g.edges.push_back(DependencyEdge::from_json(e));
    }
    return g;
}

void DependencyGraph::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write graph: " + path.string());
    out << to_json().dump(2) << "\n";
}

DependencyGraph DependencyGraph::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("graph file is not valid JSON");
    return from_json(j);
}

DependencyGraph init_full(const SpecMap& specs) {
    DependencyGraph g;
    for (const auto& [name, _] : specs) g.nodes.push_back(name);
    for (const auto& src : g.nodes) {
        for (const auto& dst : g.nodes) {
            if (src == dst) continue; // self-loops excluded
            const size_t arity = specs.at(dst).input_descriptions.size();
            for (size_t k = 0; k < arity; ++k) {
                DependencyEdge e;
                e.src = src;
                e.dst = dst;
                e.param_index = static_cast<int>(k);
                g.edges.push_back(std::move(e));
            }
        }
    }
    return g;
}

DependencyGraph filter_embedding(const DependencyGraph& g, const SpecMap& specs,
                                 Provider& provider, double tau) {
    if (tau < -1.0 || tau > 1.0) throw Error("tau must lie in [-1, 1]");
    DependencyGraph out = g;
    std::map<std::string, std::vector<double>> memo;
    auto embed_memo = [&](const std::string& text) -> const std::vector<double>& {
        auto it = memo.find(text);
        if (it == memo.end()) {
            it = memo.emplace(text, provider.embed(text)).first;
        }
        return it->second;
    };
    for (auto& e : out.edges) {
        if (e.stage != EdgeStage::Initial) continue;
        const ParsedSpec& src_spec = specs.at(e.src);
        const ParsedSpec& dst_spec = specs.at(e.dst);
        const std::string& in_desc =
            dst_spec.input_descriptions.at(static_cast<size_t>(e.param_index));
        e.similarity = cosine(embed_memo(in_desc),
                              embed_memo(src_spec.output_description));
        e.has_similarity = true;
        if (e.similarity >= tau) {
            e.stage = EdgeStage::PassedEmbedding;
        } else {
            e.stage = EdgeStage::Rejected;
            e.rejected_at = FilterStage::Embedding;
            e.reject_cause = "below-threshold";
        }
    }
    return out;
}

namespace {

bool truthy(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        return s == "True" || s == "true";
    }
    return false;
}

} // namespace

DependencyGraph filter_llm(const DependencyGraph& g, const Corpus& corpus,
                           const SpecMap& specs, Provider& provider,
                           int workers) {
    DependencyGraph out = g;
    std::vector<size_t> todo;
    for (size_t i = 0; i < out.edges.size(); ++i) {
        if (out.edges[i].stage == EdgeStage::PassedEmbedding) todo.push_back(i);
    }
    auto verdicts = parallel_map<json>(todo.size(), workers, [&](size_t t) {
        const DependencyEdge& e = out.edges[todo[t]];
        const ApiDocument src_doc = find_doc(corpus, e.src);
        const ApiDocument dst_doc = find_doc(corpus, e.dst);
        json payload = {
            {"API1 Document", src_doc.to_json()},
            {"API1 Semantic Descriptions", specs.at(e.src).output_description},
            {"API2 Document", dst_doc.to_json()},
            {"API2 Semantic Descriptions",
             specs.at(e.dst).input_descriptions.at(
                 static_cast<size_t>(e.param_index))},
            {"Target Input",
             {{"index", e.param_index},
              {"name", dst_doc.parameters.at(static_cast<size_t>(e.param_index))
                           .name}}}};
        try {
            return chat_json(provider,
                             prompts::make_request(prompts::kEdgeLlmFilter,
                                                   canonical_dump(payload)));
        } catch (const ProviderFormatError&) {
            return json(); // null marks a format failure after retry
        }
    });
    for (size_t t = 0; t < todo.size(); ++t) {
        DependencyEdge& e = out.edges[todo[t]];
        const json& v = verdicts[t];
        if (v.is_null() || !v.is_object() || !v.contains("connectable")) {
            e.stage = EdgeStage::Rejected;
            e.rejected_at = FilterStage::LLM;
            e.reject_cause = "format";
        } else if (truthy(v.at("connectable"))) {
            e.stage = EdgeStage::PassedLLM;
            e.justification = v.value("reason", "");
        } else {
            e.stage = EdgeStage::Rejected;
            e.rejected_at = FilterStage::LLM;
            e.reject_cause = "not-connectable";
        }
    }
    return out;
}

DependencyGraph filter_execution(const DependencyGraph& g, const Corpus& corpus,
                                 const SpecMap& specs, Environment& env,
                                 Provider& provider, int workers) {
    (void)specs;
    DependencyGraph out = g;
    std::vector<size_t> todo;
    for (size_t i = 0; i < out.edges.size(); ++i) {
        if (out.edges[i].stage == EdgeStage::PassedLLM) todo.push_back(i);
    }
    struct Outcome {
        bool passed = false;
        std::string cause;
    };
    auto outcomes = parallel_map<Outcome>(todo.size(), workers, [&](size_t t) -> Outcome {
        const DependencyEdge& e = out.edges[todo[t]];
        const ApiDocument src_doc = find_doc(corpus, e.src);
        const ApiDocument dst_doc = find_doc(corpus, e.dst);
        // (1) instantiate and execute the source call
        json src_args;
        try {
            src_args = chat_json(
                provider,
                prompts::make_request(
                    prompts::kEdgeFirstCall,
                    canonical_dump(json{{"API Document", src_doc.to_json()}})));
        } catch (const ProviderFormatError&) {
            return {false, "format"};
        }
        ApiOutput src_out;
        try {
            src_out = env.execute({e.src, src_args});
        } catch (const UnknownFunctionError&) {
            return {false, "exec-failure"};
        }
        if (!src_out.ok()) return {false, "exec-failure"};
        // (2) derive the destination call's k-th argument from the output
        json dst_args;
        try {
            json payload = {
                {"API Document", dst_doc.to_json()},
                {"API Call Results", {{e.src, src_out.to_json()}}},
                {"Reason", json::array({e.justification})}};
            dst_args = chat_json(provider,
                                 prompts::make_request(
                                     prompts::kEdgeSubsequentCall,
                                     canonical_dump(payload)));
        } catch (const ProviderFormatError&) {
            return {false, "format"};
        }
        // (3) verify the linkage between output and generated parameters
        try {
            json payload = {{"api_result", src_out.to_json()},
                            {"llm_result", dst_args}};
            json verdict = chat_json(provider,
                                     prompts::make_request(
                                         prompts::kEdgeVerify,
                                         canonical_dump(payload)));
            if (verdict.contains("connectable") && truthy(verdict.at("connectable"))) {
                return {true, ""};
            }
            return {false, "unverified"};
        } catch (const ProviderFormatError&) {
            return {false, "format"};
        }
    });
    for (size_t t = 0; t < todo.size(); ++t) {
        DependencyEdge& e = out.edges[todo[t]];
        if (outcomes[t].passed) {
            e.stage = EdgeStage::PassedExecution;
        } else {
            e.stage = EdgeStage::Rejected;
            e.rejected_at = FilterStage::Execution;
            e.reject_cause = outcomes[t].cause;
        }
    }
    return out;
}

json StageMetrics::to_json() const {
    return {{"tp", tp},
            {"fp", fp},
            {"fn", fn},
            {"precision", precision},
            {"recall", recall},
            {"precision_undefined", precision_undefined}};
}

json StageMetricsReport::to_json() const {
    json cum = json::object(), iso = json::object();
    for (const auto& [k, v] : cumulative) cum[k] = v.to_json();
    for (const auto& [k, v] : isolated) iso[k] = v.to_json();
    return {{"cumulative", cum}, {"isolated", iso}};
}

namespace {

StageMetrics compute_metrics(const std::vector<std::pair<bool, bool>>& cases) {
    // pair: (labeled valid, predicted positive)
    StageMetrics m;
    for (const auto& [valid, predicted] : cases) {
        if (predicted && valid) ++m.tp;
        else if (predicted && !valid) ++m.fp;
        else if (!predicted && valid) ++m.fn;
    }
    if (m.tp + m.fp > 0) {
        m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    } else {
        m.precision = 0.0;
        m.precision_undefined = true;
    }
    m.recall = (m.tp + m.fn > 0)
                   ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                   : 0.0;
    return m;
}

} // namespace

StageMetricsReport stage_metrics(const DependencyGraph& g,
                                 const EdgeLabels& labels) {
    if (labels.empty()) throw EmptyLabelError("no edge labels supplied");
    std::vector<std::pair<const DependencyEdge*, bool>> labeled;
    for (const auto& e : g.edges) {
        auto it = labels.find(e.key());
        if (it != labels.end()) labeled.emplace_back(&e, it->second);
    }
    if (labeled.empty()) {
        throw EmptyLabelError("labels do not match any graph edge");
    }
    StageMetricsReport report;
    for (FilterStage s : {FilterStage::Embedding, FilterStage::LLM,
                          FilterStage::Execution}) {
        std::vector<std::pair<bool, bool>> cum, iso;
        for (const auto& [e, valid] : labeled) {
            cum.emplace_back(valid, e->passed(s));
            if (e->entered(s)) iso.emplace_back(valid, e->passed(s));
        }
        report.cumulative[to_string(s)] = compute_metrics(cum);
        report.isolated[to_string(s)] = compute_metrics(iso);
    }
    return report;
}

EdgeLabels load_edge_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label file: " + path.string());
    EdgeLabels labels;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaError("invalid label record", line_no);
        }
        DependencyEdge e;
        e.src = j.at("src").get<std::string>();
        e.dst = j.at("dst").get<std::string>();
        e.param_index = j.at("param_index").get<int>();
        labels[e.key()] = j.at("valid").get<bool>();
    }
    return labels;
}

} // namespace apigraph
