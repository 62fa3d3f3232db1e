#include "apigraph/synth.hpp"

#include <algorithm>
#include <map>

#include "apigraph/errors.hpp"
#include "apigraph/prompts.hpp"

namespace apigraph {

json CallUnit::to_json() const {
    return {{"sub_query", sub_query},
            {"call", call.to_json()},
            {"output", output.to_json()}};
}

CallUnit CallUnit::from_json(const json& j) {
    CallUnit u;
    u.sub_query = j.at("sub_query").get<std::string>();
    u.call.api_name = j.at("call").at("api_name").get<std::string>();
    u.call.input = j.at("call").at("input");
    u.output = ApiOutput::from_json(j.at("output"));
    return u;
}

json TaskSample::to_json() const {
    json units_json = json::array();
    for (const auto& u : units) units_json.push_back(u.to_json());
    return {{"query", query},
            {"units", units_json},
            {"final_response", final_response},
            {"gold_path", gold_path},
            {"seed", seed},
            {"request_digests", request_digests}};
}

TaskSample TaskSample::from_json(const json& j) {
    TaskSample s;
    s.query = j.at("query").get<std::string>();
    for (const auto& u : j.at("units")) s.units.push_back(CallUnit::from_json(u));
    s.final_response = j.at("final_response").get<std::string>();
    s.gold_path = j.at("gold_path").get<std::vector<std::string>>();
    s.seed = j.value("seed", 0ull);
    for (const auto& d : j.value("request_digests", json::array())) {
        s.request_digests.push_back(d);
    }
    return s;
}

json Synthesizer::ask(const ChatRequest& request) {
    digests_.push_back({{"prompt_id", request.prompt_id},
                        {"digest", cache_key(provider_.id(), request)}});
    return chat_json(provider_, request);
}

ApiCall Synthesizer::fill_arguments(const std::string& node,
                                    const SubgraphTask& task,
                                    const std::vector<CallUnit>& history) {
    const ApiDocument doc = find_doc(corpus_, node);
    std::map<std::string, const CallUnit*> executed;
    std::map<std::string, size_t> exec_pos;
    for (size_t i = 0; i < history.size(); ++i) {
        executed[history[i].call.api_name] = &history[i];
        exec_pos[history[i].call.api_name] = i;
    }

    // One source edge per parameter; with parallel edges onto the same
    // parameter, the most recently executed source wins.
    std::map<int, const DependencyEdge*> edge_for_param;
    for (const auto& e : task.retained_edges) {
        if (e.dst != node) continue;
        if (!executed.count(e.src)) {
            throw Error("predecessor " + e.src + " not yet executed for " + node);
        }
        auto it = edge_for_param.find(e.param_index);
        if (it == edge_for_param.end() ||
            exec_pos[e.src] > exec_pos[it->second->src]) {
            edge_for_param[e.param_index] = &e;
        }
    }

    json args = json::object();
    if (edge_for_param.empty()) {
        json payload = {{"API Document", doc.to_json()}};
        args = ask(prompts::make_request(prompts::kMakeFirstCall,
                                         canonical_dump(payload)));
    } else {
        json param_dict = json::object();
        for (size_t k = 0; k < doc.parameters.size(); ++k) {
            param_dict[std::to_string(k)] = doc.parameters[k].name;
        }
        json param_value = json::object();
        json previous = json::object();
        for (const auto& [k, e] : edge_for_param) {
            param_value[std::to_string(k)] = {{"docid", e->src},
                                              {"reason", e->justification}};
            previous[e->src] = executed.at(e->src)->output.to_json();
        }
        json payload = {{"API Document", doc.to_json()},
                        {"Parameter Dictionary", param_dict},
                        {"Parameter Value", param_value},
                        {"Previous Result", previous}};
        json extracted = ask(prompts::make_request(prompts::kMakeCallStep1,
                                                   canonical_dump(payload)));
        // Every edge-cited parameter must come back grounded in the cited
        // output.
        for (const auto& [k, e] : edge_for_param) {
            const std::string& pname =
                doc.parameters.at(static_cast<size_t>(k)).name;
            if (!extracted.contains(pname)) {
                throw ExtractionError("no value extracted for " + node + "." +
                                      pname);
            }
            const json& src_response = executed.at(e->src)->output.response;
            if (!json_contains_value(src_response, extracted.at(pname))) {
                throw ExtractionError("value for " + node + "." + pname +
                                      " not found in output of " + e->src);
            }
        }
        json completion_payload = {{"API Document", doc.to_json()},
                                   {"Partially Filled Parameters", extracted}};
        args = ask(prompts::make_request(prompts::kMakeCallStep2,
                                         canonical_dump(completion_payload)));
        // Step-1 extractions are authoritative over the completion pass.
        for (const auto& [key, value] : extracted.items()) args[key] = value;
    }

    if (!args.is_object()) {
        throw ProviderFormatError("argument reply for " + node +
                                  " is not a dictionary");
    }
    // Undeclared keys are dropped rather than sent to the environment.
    json cleaned = json::object();
    for (const auto& p : doc.parameters) {
        if (args.contains(p.name)) cleaned[p.name] = args.at(p.name);
    }
    for (const auto& p : doc.parameters) {
        if (p.required && !cleaned.contains(p.name)) {
            throw MissingRequiredError("required parameter '" + p.name +
                                       "' unfilled for " + node);
        }
    }
    return {node, cleaned};
}

std::string Synthesizer::gen_subquery(const ApiCall& call,
                                      const ApiOutput& output,
                                      const ApiDocument& doc,
                                      const std::vector<CallUnit>& history) {
    (void)output;
    json previous = json::object();
    for (const auto& u : history) {
        previous[u.call.api_name] = u.output.to_json();
    }
    json payload = {{"API Document", doc.to_json()},
                    {"API call", call.input},
                    {"Previous API Response", previous}};
    json reply = ask(prompts::make_request(prompts::kSubinstruction,
                                           canonical_dump(payload)));
    if (!reply.contains("instruction") || !reply.at("instruction").is_string() ||
        reply.at("instruction").get<std::string>().empty()) {
        throw ProviderFormatError("sub-instruction reply missing 'instruction'");
    }
    return reply.at("instruction").get<std::string>();
}

std::string Synthesizer::gen_user_query(
    const std::vector<std::string>& subqueries) {
    if (subqueries.empty()) throw Error("gen_user_query: no sub-queries");
    json payload = {{"Subinstructions", subqueries}};
    json reply = ask(prompts::make_request(prompts::kUserQuery,
                                           canonical_dump(payload)));
    if (!reply.contains("query") || !reply.at("query").is_string() ||
        reply.at("query").get<std::string>().empty()) {
        throw ProviderFormatError("query reply missing 'query'");
    }
    const std::string query = reply.at("query").get<std::string>();
    for (const auto& doc : corpus_) {
        if (query.find(doc.name) != std::string::npos) {
            throw LeakError("function name '" + doc.name +
                            "' leaked into user query");
        }
    }
    return query;
}

std::string Synthesizer::gen_final_response(const std::string& query,
                                            const std::vector<CallUnit>& units) {
    if (units.empty()) throw Error("gen_final_response: no call units");
    json results = json::array();
    for (const auto& u : units) {
        results.push_back({{"subinstruction", u.sub_query},
                           {"api response", u.output.to_json()}});
    }
    json payload = {{"User Query", query}, {"API Call Result", results}};
    json reply = ask(prompts::make_request(prompts::kFinalResponse,
                                           canonical_dump(payload)));
    if (!reply.contains("final_answer") || !reply.at("final_answer").is_string()) {
        throw ProviderFormatError("final response reply missing 'final_answer'");
    }
    return reply.at("final_answer").get<std::string>();
}

SynthResult Synthesizer::synth_once(const SubgraphTask& task) {
    digests_.clear();
    std::vector<CallUnit> units;
    for (const auto& node : task.nodes) {
        CallUnit unit;
        try {
            unit.call = fill_arguments(node, task, units);
        } catch (const ExtractionError&) {
            return Aborted{node, "extraction"};
        } catch (const MissingRequiredError&) {
            return Aborted{node, "missing-required"};
        } catch (const ProviderFormatError&) {
            return Aborted{node, "format"};
        } catch (const ScriptMissError&) {
            return Aborted{node, "script-miss"};
        }
        try {
            unit.output = env_.execute(unit.call);
        } catch (const UnknownFunctionError&) {
            return Aborted{node, "exec"};
        }
        if (!unit.output.ok()) return Aborted{node, "exec"};
        try {
            unit.sub_query = gen_subquery(unit.call, unit.output,
                                          find_doc(corpus_, node), units);
        } catch (const ProviderFormatError&) {
            return Aborted{node, "format"};
        } catch (const ScriptMissError&) {
            return Aborted{node, "script-miss"};
        }
        units.push_back(std::move(unit));
    }

    TaskSample sample;
    sample.seed = task.seed;
    sample.units = std::move(units);
    std::vector<std::string> subqueries;
    for (const auto& u : sample.units) subqueries.push_back(u.sub_query);
    try {
        sample.query = gen_user_query(subqueries);
        sample.final_response = gen_final_response(sample.query, sample.units);
    } catch (const LeakError&) {
        return Aborted{"", "leak"};
    } catch (const ProviderFormatError&) {
        return Aborted{"", "format"};
    } catch (const ScriptMissError&) {
        return Aborted{"", "script-miss"};
    }
    for (const auto& u : sample.units) sample.gold_path.push_back(u.call.api_name);
    sample.request_digests = digests_;
    return sample;
}

SynthResult Synthesizer::synth_sample(const SubgraphTask& task,
                                      int retry_budget) {
    SynthResult result = synth_once(task);
    while (std::holds_alternative<Aborted>(result) && retry_budget-- > 0) {
        // Leaked queries are discarded, not regenerated.
        if (std::get<Aborted>(result).cause == "leak") break;
        result = synth_once(task);
    }
    return result;
}

} // namespace apigraph
