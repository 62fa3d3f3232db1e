#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "apigraph/dataset_io.hpp"
#include "apigraph/errors.hpp"

using namespace apigraph;
namespace fs = std::filesystem;

namespace {

SampleRecord make_record() {
    SampleRecord rec;
    rec.query = "What are the tax deductions for a Data Scientist's salary?";
    rec.api_path.push_back({"GetOccupationSalary",
                            {{"occupation", "Data Scientist"}},
                            ApiOutput::success(json{{"salary", 150000}}).to_json(),
                            "Retrieve the salary."});
    rec.api_path.push_back({"TaxCalculator",
                            {{"salary", 150000.0}},
                            ApiOutput::success(json{{"salary_after_tax", 105000.0}})
                                .to_json(),
                            "Calculate the tax."});
    rec.final_response = "Around $105,000 after tax.";
    return rec;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name) {
        path = fs::temp_directory_path() /
               ("apigraph-dsio-" + std::to_string(::getpid()) + name);
    }
    ~TempFile() { fs::remove(path); }
};

Corpus tiny_corpus() {
    ApiDocument a;
    a.tool = "job_info";
    a.name = "GetOccupationSalary";
    a.description = "salary lookup";
    a.parameters = {{"occupation", "string", true, "occupation name"}};
    a.output_schema = "salary";
    ApiDocument b = a;
    b.name = "TaxCalculator";
    b.parameters = {{"salary", "number", true, "gross salary"}};
    return {a, b};
}

} // namespace

TEST_CASE("sample records round-trip through the canonical file format") {
    TempFile f("rt.jsonl");
    std::vector<SampleRecord> recs = {make_record()};
    write_samples(recs, f.path);
    auto back = read_samples(f.path, true); // strict accepts our own output
    REQUIRE(back.size() == 1);
    CHECK(canonical_dump(back[0].to_json()) ==
          canonical_dump(recs[0].to_json()));
    CHECK(gold_path(back[0]) == std::vector<std::string>{"GetOccupationSalary",
                                                         "TaxCalculator"});
}

TEST_CASE("strict mode rejects unknown fields and the legacy spelling") {
    json j = make_record().to_json();
    j["mystery"] = 1;
    CHECK_THROWS_AS(SampleRecord::from_json(j, true), SchemaError);
    SampleRecord lenient = SampleRecord::from_json(j, false);
    CHECK(lenient.extra.at("mystery") == 1);
    // Lenient mode preserves unknowns through re-serialization.
    CHECK(lenient.to_json().at("mystery") == 1);

    json legacy = make_record().to_json();
    legacy["api_path"][0]["subinstruction"] =
        legacy["api_path"][0]["sub_instruction"];
    legacy["api_path"][0].erase("sub_instruction");
    CHECK_THROWS_AS(SampleRecord::from_json(legacy, true), SchemaError);
    SampleRecord norm = SampleRecord::from_json(legacy, false);
    CHECK(norm.api_path[0].sub_instruction == "Retrieve the salary.");
    // Normalized back to the canonical spelling on output.
    CHECK(norm.to_json().at("api_path")[0].contains("sub_instruction"));
}

TEST_CASE("reader reports the offending line number") {
    TempFile f("bad.jsonl");
    {
        std::ofstream out(f.path);
        out << canonical_dump(make_record().to_json()) << "\n";
        json missing = make_record().to_json();
        missing.erase("final_response");
        out << canonical_dump(missing) << "\n";
    }
    try {
        read_samples(f.path);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.line == 2);
    }

    std::ofstream(f.path) << "{not json\n";
    CHECK_THROWS_AS(read_samples(f.path), SchemaError);
}

TEST_CASE("sft mask spans parse back to exactly the argument values") {
    auto sft = export_sft({make_record()}, tiny_corpus());
    REQUIRE(sft.size() == 1);
    const SftRecord& r = sft[0];

    // Target layout: fenced json plan, then the final response.
    CHECK(r.target.rfind("```json\n", 0) == 0);
    CHECK(r.target.find("\n```\nAround $105,000 after tax.") !=
          std::string::npos);
    // Prompt carries the query plus each cited document once.
    CHECK(r.prompt.rfind(make_record().query, 0) == 0);
    CHECK(r.prompt.find("\"name\":\"GetOccupationSalary\"") !=
          std::string::npos);
    CHECK(r.prompt.find("\"name\":\"TaxCalculator\"") != std::string::npos);

    REQUIRE(r.mask_spans.size() == 2); // one per argument value
    std::vector<json> masked;
    for (auto [s, e] : r.mask_spans) {
        masked.push_back(json::parse(r.target.substr(s, e - s)));
    }
    CHECK(masked[0] == json("Data Scientist"));
    CHECK(masked[1] == json(150000.0));
    // Spans exclude the surrounding key/punctuation.
    for (auto [s, e] : r.mask_spans) {
        CHECK(r.target[s - 1] == ':');
    }
}

TEST_CASE("sft export writes one jsonl line per sample") {
    TempFile f("sft.jsonl");
    auto sft = export_sft({make_record(), make_record()}, tiny_corpus());
    write_sft(sft, f.path);
    std::ifstream in(f.path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        json j = json::parse(line);
        CHECK(j.contains("prompt"));
        CHECK(j.contains("target"));
        CHECK(j.at("mask_spans").is_array());
    }
    CHECK(lines == 2);
}

TEST_CASE("retriever pairs are (query, gold doc) with exact dedup") {
    SampleRecord rec = make_record();
    // Repeat a gold call: the duplicate pair must be dropped.
    rec.api_path.push_back(rec.api_path[0]);
    auto pairs = export_retriever_pairs({rec, rec});
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].query == rec.query);
    CHECK(pairs[0].positive_doc_id == "GetOccupationSalary");
    CHECK(pairs[1].positive_doc_id == "TaxCalculator");

    SampleRecord other = make_record();
    other.query = "different question";
    auto more = export_retriever_pairs({rec, other});
    CHECK(more.size() == 4); // same doc under a new query is a new pair
}

TEST_CASE("to_record maps a synthesized sample onto the disk schema") {
    TaskSample s;
    s.query = "q";
    s.final_response = "f";
    CallUnit u;
    u.sub_query = "sub";
    u.call = {"GetOccupationSalary", {{"occupation", "x"}}};
    u.output = ApiOutput::success(json{{"salary", 1}});
    s.units = {u};
    SampleRecord rec = to_record(s);
    CHECK(rec.query == "q");
    CHECK(rec.final_response == "f");
    REQUIRE(rec.api_path.size() == 1);
    CHECK(rec.api_path[0].api_name == "GetOccupationSalary");
    CHECK(rec.api_path[0].sub_instruction == "sub");
    CHECK(rec.api_path[0].output.at("error") == "");
}
