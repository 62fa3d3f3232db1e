#include "apigraph/retriever.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>

#include "apigraph/errors.hpp"

namespace apigraph {

std::string doc_embedding_text(const ApiDocument& doc) {
    std::string text = doc.tool + " " + doc.name + " " + doc.description;
    for (const auto& p : doc.parameters) {
        text += " " + p.name + " " + p.description;
    }
    return text;
}

std::string embedder_fingerprint(Provider& embedder) {
    const auto probe = embedder.embed("fingerprint probe");
    return embedder.id() + ":dim=" + std::to_string(probe.size());
}

DocIndex build_index(const Corpus& corpus, Provider& embedder) {
    if (corpus.empty()) throw EmptyCorpusError("cannot index an empty corpus");
    DocIndex index;
    index.fingerprint = embedder_fingerprint(embedder);
    for (const auto& doc : corpus) {
        index.ids.push_back(doc.name);
        index.vectors.push_back(embedder.embed(doc_embedding_text(doc)));
    }
    return index;
}

std::vector<std::string> search(const DocIndex& index, Provider& embedder,
                                const std::string& query, size_t k) {
    if (embedder_fingerprint(embedder) != index.fingerprint) {
        throw FingerprintMismatchError("index built with '" + index.fingerprint +
                                       "', queried with '" +
                                       embedder_fingerprint(embedder) + "'");
    }
    const auto qvec = embedder.embed(query);
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(index.ids.size());
    for (size_t i = 0; i < index.ids.size(); ++i) {
        scored.emplace_back(cosine(qvec, index.vectors[i]), index.ids[i]);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (size_t i = 0; i < scored.size() && i < k; ++i) {
        out.push_back(scored[i].second);
    }
    return out;
}

namespace {

double recall_at(const DocIndex& index, Provider& embedder,
                 const std::string& query, const std::set<std::string>& gold,
                 size_t k) {
    const auto hits = search(index, embedder, query, k);
    size_t found = 0;
    for (const auto& id : hits) found += gold.count(id);
    return static_cast<double>(found) / static_cast<double>(gold.size());
}

} // namespace

RecallReport recall_eval(const DocIndex& index, Provider& embedder,
                         const std::vector<SampleRecord>& samples) {
    RecallReport report;
    double sum_gt = 0.0;
    double sum_5 = 0.0;
    for (const auto& rec : samples) {
        std::set<std::string> gold;
        for (const auto& name : gold_path(rec)) gold.insert(name);
        if (gold.empty()) continue;
        sum_gt += recall_at(index, embedder, rec.query, gold, gold.size());
        sum_5 += recall_at(index, embedder, rec.query, gold, 5);
        ++report.samples;
    }
    if (report.samples > 0) {
        report.recall_at_gt = sum_gt / static_cast<double>(report.samples);
        report.recall_at_5 = sum_5 / static_cast<double>(report.samples);
    }
    return report;
}

void DocIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    json meta = {{"ids", ids}, {"fingerprint", fingerprint}};
    meta["dim"] = vectors.empty() ? 0 : vectors.front().size();
    std::ofstream mf(dir / "index.json");
    if (!mf) throw Error("cannot write index metadata: " + dir.string());
    mf << canonical_dump(meta) << "\n";

    std::ofstream vf(dir / "vectors.bin", std::ios::binary);
    if (!vf) throw Error("cannot write index vectors: " + dir.string());
    for (const auto& vec : vectors) {
        vf.write(reinterpret_cast<const char*>(vec.data()),
                 static_cast<std::streamsize>(vec.size() * sizeof(double)));
    }
}

DocIndex DocIndex::load(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "index.json");
    if (!mf) throw Error("cannot open index metadata: " + dir.string());
    json meta = json::parse(mf, nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) {
        throw SchemaError("invalid index metadata");
    }
    DocIndex index;
    index.ids = meta.at("ids").get<std::vector<std::string>>();
    index.fingerprint = meta.at("fingerprint").get<std::string>();
    const size_t dim = meta.at("dim").get<size_t>();

    std::ifstream vf(dir / "vectors.bin", std::ios::binary);
    if (!vf) throw Error("cannot open index vectors: " + dir.string());
    for (size_t i = 0; i < index.ids.size(); ++i) {
        std::vector<double> vec(dim);
        vf.read(reinterpret_cast<char*>(vec.data()),
                static_cast<std::streamsize>(dim * sizeof(double)));
        if (static_cast<size_t>(vf.gcount()) != dim * sizeof(double)) {
            throw SchemaError("index vector blob truncated");
        }
        index.vectors.push_back(std::move(vec));
    }
    return index;
}

} // namespace apigraph
