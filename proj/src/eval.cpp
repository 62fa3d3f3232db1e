#include "apigraph/eval.hpp"

#include <algorithm>
#include <sstream>

#include "apigraph/errors.hpp"
#include "apigraph/prompts.hpp"

namespace apigraph {

namespace {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Numbers normalized to double so 150000 and 150000.0 serialize identically.
json canonicalize_numbers(const json& j) {
    if (j.is_number_integer() || j.is_number_unsigned()) {
        return json(j.get<double>());
    }
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : j.items()) out[k] = canonicalize_numbers(v);
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(canonicalize_numbers(v));
        return out;
    }
    return j;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                          : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

double selection_accuracy(const std::set<std::string>& pred,
                          const std::set<std::string>& gold) {
    return jaccard(pred, gold);
}

double invocation_accuracy(const std::vector<ApiCall>& pred,
                           const std::vector<ApiCall>& gold) {
    auto keyed = [](const std::vector<ApiCall>& calls) {
        std::set<std::string> out;
        for (const auto& c : calls) {
            out.insert(c.api_name + "\x1f" +
                       canonical_dump(canonicalize_numbers(c.input)));
        }
        return out;
    };
    return jaccard(keyed(pred), keyed(gold));
}

bool correct_path(const std::vector<std::string>& gold,
                  const std::vector<std::string>& pred) {
    size_t g = 0;
    for (size_t p = 0; p < pred.size() && g < gold.size(); ++p) {
        if (pred[p] == gold[g]) ++g;
    }
    return g == gold.size();
}

std::optional<double> delta_solution_length(
    const std::vector<std::pair<size_t, size_t>>& successes) {
    if (successes.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [pred_len, gold_len] : successes) {
        sum += static_cast<double>(pred_len) - static_cast<double>(gold_len);
    }
    return sum / static_cast<double>(successes.size());
}

double rouge_l(const std::string& pred, const std::string& gold) {
    const auto p = tokenize(pred);
    const auto g = tokenize(gold);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_length(p, g));
    if (lcs == 0.0) return 0.0;
    const double prec = lcs / static_cast<double>(p.size());
    const double rec = lcs / static_cast<double>(g.size());
    return 2.0 * prec * rec / (prec + rec);
}

double correctness(const std::vector<ApiOutput>& pred,
                   const std::vector<ApiOutput>& gold) {
    if (pred.empty()) return 0.0;
    std::vector<bool> used(gold.size(), false);
    size_t matched = 0;
    for (const auto& p : pred) {
        for (size_t i = 0; i < gold.size(); ++i) {
            if (used[i]) continue;
            if (json_equal_numeric(p.to_json(), gold[i].to_json())) {
                used[i] = true;
                ++matched;
                break;
            }
        }
    }
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

Verdict success_rate(const std::string& query, const json& execution_details,
                     const std::string& answer, Provider& judge_provider) {
    json payload = {{"User Query", query},
                    {"Tool Execution Details", execution_details},
                    {"Final Answer", answer}};
    ChatRequest request = prompts::make_request(prompts::kJudgeSuccess,
                                                canonical_dump(payload));
    for (int attempt = 0; attempt < 2; ++attempt) {
        json reply;
        try {
            reply = chat_json(judge_provider, request);
        } catch (const ProviderFormatError&) {
            if (attempt == 0) continue;
            throw JudgeFormatError("judge reply is not a JSON dictionary");
        }
        const std::string status =
            reply.is_object() ? reply.value("answer_status", std::string())
                              : std::string();
        if (status == "Solved") return Verdict::Solved;
        if (status == "Unsolved") return Verdict::Unsolved;
        if (attempt == 0) continue;
        throw JudgeFormatError("judge answer_status must be \"Solved\" or "
                               "\"Unsolved\", got '" + status + "'");
    }
    throw JudgeFormatError("unreachable");
}

json SampleMetrics::to_json() const {
    json j = {{"query", query},      {"sa", sa},
              {"ia", ia},            {"cp", cp},
              {"rouge_l", rouge},    {"correctness", correct},
              {"pred_len", pred_len}, {"gold_len", gold_len}};
    if (verdict) {
        j["answer_status"] = *verdict == Verdict::Solved ? "Solved" : "Unsolved";
    }
    return j;
}

json MetricReport::to_json() const {
    json per_sample = json::array();
    for (const auto& s : samples) per_sample.push_back(s.to_json());
    json j = {{"sa", sa},
              {"ia", ia},
              {"correct_path_rate", cp_rate},
              {"rouge_l", rouge},
              {"correctness", correct},
              {"solved", solved},
              {"unsolved", unsolved},
              {"samples", per_sample},
              // Success on path-style data is judged by the model here, not
              // by a human annotator.
              {"sr_judged_by_model", true}};
    j["delta_solution_length"] =
        delta_len ? json(*delta_len) : json("undefined");
    return j;
}

std::string MetricReport::to_table() const {
    std::ostringstream out;
    auto row = [&out](const std::string& name, const std::string& value) {
        out << name;
        for (size_t i = name.size(); i < 24; ++i) out << ' ';
        out << value << "\n";
    };
    auto pct = [](double v) {
        std::ostringstream s;
        s.precision(1);
        s << std::fixed << v * 100.0;
        return s.str();
    };
    row("metric", "value");
    row("SA", pct(sa));
    row("IA", pct(ia));
    row("Correct Path%", pct(cp_rate));
    row("ROUGE-L", pct(rouge));
    row("Correctness", pct(correct));
    if (solved + unsolved > 0) {
        row("Success Rate",
            pct(static_cast<double>(solved) /
                static_cast<double>(solved + unsolved)));
    }
    row("Delta solution length",
        delta_len ? std::to_string(*delta_len) : std::string("undefined"));
    return out.str();
}

MetricReport evaluate(const std::vector<Trajectory>& trajectories,
                      const std::vector<SampleRecord>& gold,
                      Provider* judge_provider) {
    if (trajectories.size() != gold.size()) {
        throw Error("evaluate: trajectory/gold count mismatch");
    }
    MetricReport report;
    std::vector<std::pair<size_t, size_t>> successes;
    size_t cp_hits = 0;
    for (size_t i = 0; i < trajectories.size(); ++i) {
        const Trajectory& traj = trajectories[i];
        const SampleRecord& rec = gold[i];

        std::vector<ApiCall> pred_calls;
        std::vector<ApiOutput> pred_outputs;
        for (const auto& s : traj.steps) {
            if (!s.executed) continue;
            pred_calls.push_back(s.call);
            pred_outputs.push_back(s.output);
        }
        std::vector<ApiCall> gold_calls;
        std::vector<ApiOutput> gold_outputs;
        for (const auto& s : rec.api_path) {
            gold_calls.push_back({s.api_name, s.input});
            gold_outputs.push_back(ApiOutput::from_json(s.output));
        }
        std::set<std::string> pred_names, gold_names;
        for (const auto& c : pred_calls) pred_names.insert(c.api_name);
        for (const auto& c : gold_calls) gold_names.insert(c.api_name);

        SampleMetrics m;
        m.query = rec.query;
        m.sa = selection_accuracy(pred_names, gold_names);
        m.ia = invocation_accuracy(pred_calls, gold_calls);
        m.cp = correct_path(gold_path(rec), traj.executed_names());
        m.rouge = rouge_l(traj.final_answer, rec.final_response);
        m.correct = correctness(pred_outputs, gold_outputs);
        m.pred_len = pred_calls.size();
        m.gold_len = gold_calls.size();
        if (m.cp) ++cp_hits;

        if (judge_provider) {
            json details = json::array();
            for (const auto& s : traj.steps) {
                details.push_back({{"api_name", s.call.api_name},
                                   {"input", s.call.input},
                                   {"output", s.output.to_json()},
                                   {"executed", s.executed}});
            }
            m.verdict = success_rate(traj.query, details, traj.final_answer,
                                     *judge_provider);
            if (*m.verdict == Verdict::Solved) {
                ++report.solved;
                successes.emplace_back(m.pred_len, m.gold_len);
            } else {
                ++report.unsolved;
            }
        }

        report.sa += m.sa;
        report.ia += m.ia;
        report.rouge += m.rouge;
        report.correct += m.correct;
        report.samples.push_back(std::move(m));
    }
    const double n = static_cast<double>(trajectories.size());
    if (n > 0) {
        report.sa /= n;
        report.ia /= n;
        report.rouge /= n;
        report.correct /= n;
        report.cp_rate = static_cast<double>(cp_hits) / n;
    }
    report.delta_len = delta_solution_length(successes);
    return report;
}

} // namespace apigraph
