#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "apigraph/errors.hpp"
#include "apigraph/retriever.hpp"

using namespace apigraph;
namespace fs = std::filesystem;

namespace {

ApiDocument doc(const std::string& name, const std::string& description) {
    ApiDocument d;
    d.tool = "t";
    d.name = name;
    d.description = description;
    d.parameters = {{"p", "string", true, "parameter for " + description}};
    d.output_schema = "output for " + description;
    return d;
}

Corpus corpus20() {
    static const char* topics[] = {
        "salary lookup by occupation",  "income tax calculation",
        "monthly savings estimation",   "movie title search",
        "movie plot details",           "movie keyword listing",
        "similar movie suggestions",    "weather forecast by city",
        "currency conversion rates",    "flight ticket booking",
        "hotel room availability",      "restaurant table reservation",
        "stock price quotation",        "news headline retrieval",
        "language translation service", "image caption generation",
        "music track identification",   "package delivery tracking",
        "recipe ingredient lookup",     "fitness activity logging"};
    Corpus c;
    for (int i = 0; i < 20; ++i) {
        c.push_back(doc("Fn" + std::string(i < 10 ? "0" : "") +
                            std::to_string(i),
                        topics[i]));
    }
    return c;
}

// Brute-force oracle over the same embedding space.
std::vector<std::string> oracle_search(const Corpus& c,
                                       const std::string& query, size_t k) {
    auto q = trigram_embed(query);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& d : c) {
        scored.push_back({cosine(q, trigram_embed(doc_embedding_text(d))),
                          d.name});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (size_t i = 0; i < std::min(k, scored.size()); ++i) {
        out.push_back(scored[i].second);
    }
    return out;
}

struct OtherIdProvider : Provider {
    std::string id() const override { return "other-embedder"; }
    ChatResponse chat(const ChatRequest&) override { return {"{}", false}; }
    std::vector<double> embed(const std::string& t) override {
        return trigram_embed(t);
    }
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("apigraph-retr-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("search matches the brute-force oracle on random queries") {
    Corpus c = corpus20();
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);
    std::mt19937_64 rng(3);
    const std::string words[] = {"movie",   "salary", "tax",    "booking",
                                 "weather", "track",  "recipe", "details"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string query;
        for (int w = 0; w < 3; ++w) {
            query += std::string(words[rng() % 8]) + " ";
        }
        const size_t k = 1 + rng() % 20;
        CHECK(search(index, p, query, k) == oracle_search(c, query, k));
    }
}

TEST_CASE("score ties are broken by ascending doc id") {
    // Two docs with identical text embed identically; order must be by id.
    Corpus c = {doc("Zeta", "identical text"), doc("Alpha", "identical text")};
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);
    CHECK(search(index, p, "identical text", 2) ==
          std::vector<std::string>{"Alpha", "Zeta"});
}

TEST_CASE("growing k extends the ranking without reordering it") {
    Corpus c = corpus20();
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);
    auto full = search(index, p, "movie keyword salary", 20);
    REQUIRE(full.size() == 20);
    for (size_t k = 1; k <= 20; ++k) {
        auto top = search(index, p, "movie keyword salary", k);
        REQUIRE(top.size() == k);
        CHECK(std::equal(top.begin(), top.end(), full.begin()));
    }
}

TEST_CASE("recall on the 20-doc fixture behaves as computed by hand") {
    Corpus c = corpus20();
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);

    // Queries that are the documents' own embedding texts retrieve them at
    // rank 1, so every recall is exactly 1.
    std::vector<SampleRecord> perfect;
    for (int i = 0; i < 5; ++i) {
        SampleRecord rec;
        rec.query = doc_embedding_text(c[i]);
        rec.api_path.push_back({c[i].name, json::object(), json(), ""});
        rec.final_response = "x";
        perfect.push_back(rec);
    }
    RecallReport r = recall_eval(index, p, perfect);
    CHECK(r.samples == 5);
    CHECK(r.recall_at_gt == doctest::Approx(1.0));
    CHECK(r.recall_at_5 == doctest::Approx(1.0));

    // A gold doc that never ranks in the top 5 for its query pulls recall@5
    // down by exactly 1/samples; macro averaging, verified against the oracle.
    std::vector<SampleRecord> mixed = perfect;
    SampleRecord hard;
    hard.query = doc_embedding_text(c[0]);
    hard.api_path.push_back({c[0].name, json::object(), json(), ""});
    std::string far = oracle_search(c, hard.query, 20).back();
    hard.api_path.push_back({far, json::object(), json(), ""});
    hard.final_response = "x";
    mixed.push_back(hard);
    RecallReport m = recall_eval(index, p, mixed);
    CHECK(m.samples == 6);
    CHECK(m.recall_at_5 == doctest::Approx((5.0 + 0.5) / 6.0));
    // recall@GT for the hard sample retrieves 2 docs; only c[0] is found.
    CHECK(m.recall_at_gt == doctest::Approx((5.0 + 0.5) / 6.0));
}

TEST_CASE("index persistence round-trips and rejects truncation") {
    TempDir dir;
    Corpus c = corpus20();
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);
    index.save(dir.path);
    DocIndex back = DocIndex::load(dir.path);
    CHECK(back.ids == index.ids);
    CHECK(back.fingerprint == index.fingerprint);
    REQUIRE(back.vectors.size() == index.vectors.size());
    CHECK(back.vectors[7] == index.vectors[7]);
    CHECK(search(back, p, "movie details", 3) ==
          search(index, p, "movie details", 3));

    // Truncated vector payload must fail loudly, not load garbage.
    auto size = fs::file_size(dir.path / "vectors.bin");
    fs::resize_file(dir.path / "vectors.bin", size - 8);
    CHECK_THROWS_AS(DocIndex::load(dir.path), SchemaError);
}

TEST_CASE("embedder fingerprint mismatch is rejected") {
    Corpus c = corpus20();
    ScriptedProvider p(false);
    DocIndex index = build_index(c, p);
    OtherIdProvider other;
    CHECK(embedder_fingerprint(other) != index.fingerprint);
    CHECK_THROWS_AS(search(index, other, "movie", 3),
                    FingerprintMismatchError);
}

TEST_CASE("an empty corpus cannot be indexed") {
    ScriptedProvider p(false);
    CHECK_THROWS_AS(build_index({}, p), EmptyCorpusError);
}
