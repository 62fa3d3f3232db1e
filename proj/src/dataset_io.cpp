#include "apigraph/dataset_io.hpp"

#include <fstream>
#include <set>

#include "apigraph/errors.hpp"

namespace apigraph {

json SampleRecord::to_json() const {
    json path = json::array();
    for (const auto& s : api_path) {
        path.push_back({{"api_name", s.api_name},
                        {"input", s.input},
                        {"output", s.output},
                        {"sub_instruction", s.sub_instruction}});
    }
    json j = {{"query", query},
              {"api_path", path},
              {"final_response", final_response}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

SampleRecord SampleRecord::from_json(const json& j, bool strict) {
    static const std::set<std::string> known = {"query", "api_path",
                                                "final_response"};
    SampleRecord rec;
    if (!j.contains("query") || !j.contains("api_path")) {
        throw SchemaError("record missing query/api_path");
    }
    if (!j.contains("final_response")) {
        throw SchemaError("record missing final_response");
    }
    rec.query = j.at("query").get<std::string>();
    rec.final_response = j.at("final_response").get<std::string>();
    for (const auto& s : j.at("api_path")) {
        Step step;
        step.api_name = s.at("api_name").get<std::string>();
        step.input = s.value("input", json::object());
        step.output = ApiOutput::from_json(s.value("output", json())).to_json();
        if (s.contains("sub_instruction")) {
            step.sub_instruction = s.at("sub_instruction").get<std::string>();
        } else if (s.contains("subinstruction")) {
            if (strict) {
                throw SchemaError(
                    "strict mode: use 'sub_instruction', not 'subinstruction'");
            }
            step.sub_instruction = s.at("subinstruction").get<std::string>();
        }
        rec.api_path.push_back(std::move(step));
    }
    for (const auto& [k, v] : j.items()) {
        if (known.count(k)) continue;
        if (strict) throw SchemaError("strict mode: unknown field '" + k + "'");
        rec.extra[k] = v;
    }
    return rec;
}

SampleRecord to_record(const TaskSample& sample) {
    SampleRecord rec;
    rec.query = sample.query;
    rec.final_response = sample.final_response;
    for (const auto& u : sample.units) {
        rec.api_path.push_back({u.call.api_name, u.call.input,
                                u.output.to_json(), u.sub_query});
    }
    return rec;
}

std::vector<std::string> gold_path(const SampleRecord& record) {
    std::vector<std::string> path;
    for (const auto& s : record.api_path) path.push_back(s.api_name);
    return path;
}

void write_samples(const std::vector<SampleRecord>& samples,
                   const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write samples: " + path.string());
    for (const auto& s : samples) out << canonical_dump(s.to_json()) << "\n";
}

std::vector<SampleRecord> read_samples(const std::filesystem::path& path,
                                       bool strict) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open samples: " + path.string());
    std::vector<SampleRecord> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaError("invalid sample record", line_no);
        }
        try {
            out.push_back(SampleRecord::from_json(j, strict));
        } catch (const SchemaError& e) {
            throw SchemaError(e.what(), line_no);
        } catch (const json::exception& e) {
            throw SchemaError(std::string("bad sample: ") + e.what(), line_no);
        }
    }
    return out;
}

json SftRecord::to_json() const {
    json spans = json::array();
    for (const auto& [s, e] : mask_spans) spans.push_back({s, e});
    return {{"prompt", prompt}, {"target", target}, {"mask_spans", spans}};
}

namespace {

// Serializes the call plan while recording the character span of every
// argument value, so the masks are correct by construction.
std::string serialize_plan(const SampleRecord& rec,
                           std::vector<std::pair<size_t, size_t>>& spans) {
    std::string out = "{\"api_path\":[";
    for (size_t i = 0; i < rec.api_path.size(); ++i) {
        const auto& step = rec.api_path[i];
        if (i > 0) out += ",";
        out += "{\"api_name\":" + json(step.api_name).dump() + ",\"input\":{";
        bool first = true;
        for (const auto& [name, value] : step.input.items()) {
            if (!first) out += ",";
            first = false;
            out += json(name).dump() + ":";
            const std::string serialized = value.dump();
            spans.emplace_back(out.size(), out.size() + serialized.size());
            out += serialized;
        }
        out += "}}";
    }
    out += "]}";
    return out;
}

} // namespace

std::vector<SftRecord> export_sft(const std::vector<SampleRecord>& samples,
                                  const Corpus& corpus) {
    std::vector<SftRecord> out;
    for (const auto& rec : samples) {
        SftRecord sft;
        sft.prompt = rec.query;
        std::set<std::string> cited;
        for (const auto& name : gold_path(rec)) {
            if (!cited.insert(name).second) continue;
            sft.prompt += "\n\n" + canonical_dump(find_doc(corpus, name).to_json());
        }
        std::vector<std::pair<size_t, size_t>> spans;
        const std::string plan = serialize_plan(rec, spans);
        const std::string prefix = "```json\n";
        sft.target = prefix + plan + "\n```\n" + rec.final_response;
        for (auto [s, e] : spans) {
            sft.mask_spans.emplace_back(s + prefix.size(), e + prefix.size());
        }
        // Sanity: every span must reproduce a parseable value in place.
        for (const auto& [s, e] : sft.mask_spans) {
            if (e > sft.target.size() || s >= e) {
                throw SpanError("mask span out of bounds");
            }
            json v = json::parse(sft.target.substr(s, e - s), nullptr, false);
            if (v.is_discarded()) {
                throw SpanError("mask span does not cover a JSON value");
            }
        }
        out.push_back(std::move(sft));
    }
    return out;
}

void write_sft(const std::vector<SftRecord>& records,
               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write sft records: " + path.string());
    for (const auto& r : records) out << canonical_dump(r.to_json()) << "\n";
}

std::vector<RetrieverPair> export_retriever_pairs(
    const std::vector<SampleRecord>& samples) {
    std::vector<RetrieverPair> pairs;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& rec : samples) {
        for (const auto& name : gold_path(rec)) {
            if (seen.insert({rec.query, name}).second) {
                pairs.push_back({rec.query, name});
            }
        }
    }
    return pairs;
}

void write_retriever_pairs(const std::vector<RetrieverPair>& pairs,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write retriever pairs: " + path.string());
    for (const auto& p : pairs) out << canonical_dump(p.to_json()) << "\n";
}

} // namespace apigraph
