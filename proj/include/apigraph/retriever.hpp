#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apigraph/api_spec.hpp"
#include "apigraph/dataset_io.hpp"
#include "apigraph/provider.hpp"

namespace apigraph {

/// Dense index over API documents: one unit-normalized vector per doc plus
/// the embedder fingerprint. Immutable after build; concurrent searches fine.
struct DocIndex {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> vectors;
    std::string fingerprint;

    void save(const std::filesystem::path& dir) const;
    static DocIndex load(const std::filesystem::path& dir);
};

// Text a document is embedded under (also used for queries at search time).
std::string doc_embedding_text(const ApiDocument& doc);

DocIndex build_index(const Corpus& corpus, Provider& embedder);

std::string embedder_fingerprint(Provider& embedder);

// Brute-force cosine scan; top-k, ties broken by doc id. Throws
// FingerprintMismatchError when the embedder does not match the index.
std::vector<std::string> search(const DocIndex& index, Provider& embedder,
                                const std::string& query, size_t k);

struct RecallReport {
    double recall_at_gt = 0.0;
    double recall_at_5 = 0.0;
    size_t samples = 0;

    json to_json() const {
        return {{"recall_at_gt", recall_at_gt},
                {"recall_at_5", recall_at_5},
                {"samples", samples}};
    }
};

// Macro-averaged recall over samples; recall@GT retrieves as many docs as the
// sample has unique gold functions.
RecallReport recall_eval(const DocIndex& index, Provider& embedder,
                         const std::vector<SampleRecord>& samples);

} // namespace apigraph
