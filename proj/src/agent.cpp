#include "apigraph/agent.hpp"

#include <fstream>

#include "apigraph/errors.hpp"
#include "apigraph/prompts.hpp"

namespace apigraph {

json AgentStep::to_json() const {
    return {{"sub_instruction", sub_instruction},
            {"retrieved", retrieved},
            {"call", call.to_json()},
            {"output", output.to_json()},
            {"executed", executed},
            {"flags", flags}};
}

AgentStep AgentStep::from_json(const json& j) {
    AgentStep s;
    s.sub_instruction = j.value("sub_instruction", std::string());
    s.retrieved = j.value("retrieved", std::vector<std::string>());
    s.call.api_name = j.at("call").at("api_name").get<std::string>();
    s.call.input = j.at("call").at("input");
    s.output = ApiOutput::from_json(j.at("output"));
    s.executed = j.value("executed", false);
    s.flags = j.value("flags", std::vector<std::string>());
    return s;
}

std::vector<std::string> Trajectory::executed_names() const {
    std::vector<std::string> names;
    for (const auto& s : steps) {
        if (s.executed) names.push_back(s.call.api_name);
    }
    return names;
}

json Trajectory::to_json() const {
    json steps_json = json::array();
    for (const auto& s : steps) steps_json.push_back(s.to_json());
    return {{"agent", agent},
            {"query", query},
            {"retrieved", retrieved},
            {"plan", plan},
            {"steps", steps_json},
            {"final_answer", final_answer},
            {"flags", flags}};
}

Trajectory Trajectory::from_json(const json& j) {
    Trajectory t;
    t.agent = j.at("agent").get<std::string>();
    t.query = j.at("query").get<std::string>();
    t.retrieved = j.value("retrieved", std::vector<std::string>());
    t.plan = j.value("plan", std::vector<std::string>());
    for (const auto& s : j.at("steps")) t.steps.push_back(AgentStep::from_json(s));
    t.final_answer = j.value("final_answer", std::string());
    t.flags = j.value("flags", std::vector<std::string>());
    return t;
}

std::vector<std::string> AgentRunner::retrieve(const std::string& text,
                                               size_t k) {
    return search(index_, provider_, text, k);
}

json AgentRunner::docs_payload(const std::vector<std::string>& ids) const {
    json docs = json::array();
    for (const auto& id : ids) docs.push_back(find_doc(corpus_, id).to_json());
    return docs;
}

json AgentRunner::history_payload(const std::vector<AgentStep>& steps) {
    json history = json::array();
    for (const auto& s : steps) {
        if (!s.executed) continue;
        history.push_back({{"api_name", s.call.api_name},
                           {"input", s.call.input},
                           {"output", s.output.to_json()}});
    }
    return history;
}

void AgentRunner::execute_step(Trajectory& traj, AgentStep step) {
    if (!env_.has(step.call.api_name)) {
        step.flags.push_back("UnknownFunction");
        step.output = ApiOutput::failure("unknown function: " +
                                         step.call.api_name);
    } else {
        step.output = env_.execute(step.call);
        step.executed = true;
    }
    traj.steps.push_back(std::move(step));
}

bool AgentRunner::parse_action(const json& reply, AgentStep& step) {
    if (!reply.is_object() || !reply.contains("action")) return false;
    const json& action = reply.at("action");
    if (!action.is_object() || !action.contains("api_name") ||
        !action.at("api_name").is_string()) {
        return false;
    }
    step.call.api_name = action.at("api_name").get<std::string>();
    step.call.input = action.value("input", json::object());
    if (!step.call.input.is_object()) step.call.input = json::object();
    return true;
}

std::string AgentRunner::compose_answer(const std::string& query,
                                        const std::vector<AgentStep>& steps) {
    json payload = {{"User Query", query},
                    {"Executed Calls", history_payload(steps)}};
    json reply = chat_json(provider_, prompts::make_request(
                                          prompts::kAgentAnswer,
                                          canonical_dump(payload)));
    if (!reply.contains("final_answer") ||
        !reply.at("final_answer").is_string()) {
        throw ProviderFormatError("answer reply missing 'final_answer'");
    }
    return reply.at("final_answer").get<std::string>();
}

Trajectory AgentRunner::run_global(const std::string& query, size_t k) {
    Trajectory traj;
    traj.agent = "global";
    traj.query = query;
    traj.retrieved = retrieve(query, k);

    json plan_payload = {{"User Query", query},
                         {"API Documents", docs_payload(traj.retrieved)}};
    json reply = chat_json(provider_, prompts::make_request(
                                          prompts::kAgentGlobalPlan,
                                          canonical_dump(plan_payload)));
    if (!reply.is_object() || !reply.contains("plan") ||
        !reply.at("plan").is_array() || reply.at("plan").empty()) {
        throw PlanParseError("global plan reply has no non-empty 'plan' array");
    }
    for (const auto& name : reply.at("plan")) {
        if (!name.is_string()) {
            throw PlanParseError("global plan contains a non-string entry");
        }
        traj.plan.push_back(name.get<std::string>());
    }

    for (const auto& name : traj.plan) {
        AgentStep step;
        step.call.api_name = name;
        if (!env_.has(name)) {
            step.flags.push_back("UnknownFunction");
            step.output = ApiOutput::failure("unknown function: " + name);
            traj.steps.push_back(std::move(step));
            continue;
        }
        json args_payload = {{"API Document", find_doc(corpus_, name).to_json()},
                             {"User Query", query},
                             {"Previous Outputs", history_payload(traj.steps)}};
        try {
            json args = chat_json(provider_, prompts::make_request(
                                                 prompts::kAgentMakeCall,
                                                 canonical_dump(args_payload)));
            if (!args.is_object()) {
                throw ProviderFormatError("argument reply is not a dictionary");
            }
            step.call.input = args;
        } catch (const ProviderFormatError&) {
            step.flags.push_back("ArgError");
            step.output = ApiOutput::failure("argument generation failed");
            traj.steps.push_back(std::move(step));
            continue;
        }
        // Per-step API errors are recorded; the remaining plan still runs.
        execute_step(traj, std::move(step));
    }

    traj.final_answer = compose_answer(query, traj.steps);
    return traj;
}

Trajectory AgentRunner::run_react(const std::string& query, size_t k,
                                  int max_steps) {
    Trajectory traj;
    traj.agent = "react";
    traj.query = query;
    traj.retrieved = retrieve(query, k);
    const json docs = docs_payload(traj.retrieved);

    bool finished = false;
    for (int i = 0; i < max_steps; ++i) {
        // Error envelopes stay in the history so the model sees failures.
        json step_history = json::array();
        for (const auto& s : traj.steps) {
            step_history.push_back({{"api_name", s.call.api_name},
                                    {"input", s.call.input},
                                    {"output", s.output.to_json()}});
        }
        json payload = {{"User Query", query},
                        {"API Documents", docs},
                        {"History", step_history}};
        json reply = chat_json(provider_, prompts::make_request(
                                              prompts::kAgentReactStep,
                                              canonical_dump(payload)));
        if (reply.is_object() && reply.contains("finish")) {
            traj.final_answer =
                reply.at("finish").value("final_answer", std::string());
            finished = true;
            break;
        }
        AgentStep step;
        if (!parse_action(reply, step)) {
            step.flags.push_back("BadAction");
            step.output = ApiOutput::failure("malformed action reply");
            traj.steps.push_back(std::move(step));
            continue;
        }
        execute_step(traj, std::move(step));
    }
    if (!finished) traj.flags.push_back("StepLimitReached");
    return traj;
}

Trajectory AgentRunner::run_react_decomposer(const std::string& query, size_t k,
                                             int max_steps) {
    Trajectory traj;
    traj.agent = "react_decomposer";
    traj.query = query;

    bool finished = false;
    for (int i = 0; i < max_steps; ++i) {
        json sub_payload = {{"User Query", query},
                            {"History", history_payload(traj.steps)}};
        json reply = chat_json(provider_,
                               prompts::make_request(
                                   prompts::kAgentNextSubinstruction,
                                   canonical_dump(sub_payload)));
        if (reply.is_object() && reply.contains("finish")) {
            traj.final_answer =
                reply.at("finish").value("final_answer", std::string());
            finished = true;
            break;
        }
        if (!reply.is_object() || !reply.contains("subinstruction") ||
            !reply.at("subinstruction").is_string()) {
            traj.flags.push_back("BadSubinstruction");
            break;
        }
        AgentStep step;
        step.sub_instruction = reply.at("subinstruction").get<std::string>();
        step.retrieved = retrieve(step.sub_instruction, k);
        json call_payload = {{"Subinstruction", step.sub_instruction},
                             {"API Documents", docs_payload(step.retrieved)},
                             {"History", history_payload(traj.steps)}};
        json call_reply = chat_json(provider_, prompts::make_request(
                                                   prompts::kAgentSelectCall,
                                                   canonical_dump(call_payload)));
        if (!parse_action(call_reply, step)) {
            step.flags.push_back("BadAction");
            step.output = ApiOutput::failure("malformed action reply");
            traj.steps.push_back(std::move(step));
            continue;
        }
        execute_step(traj, std::move(step));
    }
    if (!finished) traj.flags.push_back("StepLimitReached");
    return traj;
}

Trajectory AgentRunner::run_global_decomposer(const std::string& query,
                                              size_t k) {
    Trajectory traj;
    traj.agent = "global_decomposer";
    traj.query = query;

    json plan_payload = {{"User Query", query}};
    json reply = chat_json(provider_,
                           prompts::make_request(
                               prompts::kAgentSubinstructionPlan,
                               canonical_dump(plan_payload)));
    if (!reply.is_object() || !reply.contains("subinstructions") ||
        !reply.at("subinstructions").is_array() ||
        reply.at("subinstructions").empty()) {
        throw PlanParseError(
            "decomposer reply has no non-empty 'subinstructions' array");
    }
    for (const auto& s : reply.at("subinstructions")) {
        if (!s.is_string()) {
            throw PlanParseError("subinstruction plan contains a non-string");
        }
        traj.plan.push_back(s.get<std::string>());
    }

    for (const auto& sub : traj.plan) {
        AgentStep step;
        step.sub_instruction = sub;
        step.retrieved = retrieve(sub, k);
        json call_payload = {{"Subinstruction", sub},
                             {"API Documents", docs_payload(step.retrieved)},
                             {"History", history_payload(traj.steps)}};
        try {
            json call_reply = chat_json(
                provider_, prompts::make_request(prompts::kAgentSelectCall,
                                                 canonical_dump(call_payload)));
            if (!parse_action(call_reply, step)) {
                step.flags.push_back("BadAction");
                step.output = ApiOutput::failure("malformed action reply");
                traj.steps.push_back(std::move(step));
                continue;
            }
        } catch (const ProviderFormatError&) {
            step.flags.push_back("BadAction");
            step.output = ApiOutput::failure("malformed action reply");
            traj.steps.push_back(std::move(step));
            continue;
        }
        execute_step(traj, std::move(step));
    }

    traj.final_answer = compose_answer(query, traj.steps);
    return traj;
}

void write_trajectories(const std::vector<Trajectory>& trajectories,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trajectories: " + path.string());
    for (const auto& t : trajectories) out << canonical_dump(t.to_json()) << "\n";
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trajectories: " + path.string());
    std::vector<Trajectory> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaError("invalid trajectory record", line_no);
        }
        try {
            out.push_back(Trajectory::from_json(j));
        } catch (const json::exception& e) {
            throw SchemaError(std::string("bad trajectory: ") + e.what(),
                              line_no);
        }
    }
    return out;
}

} // namespace apigraph
