#include "apigraph/tool_env.hpp"

#include <fstream>

#include "apigraph/errors.hpp"

namespace apigraph {

ApiOutput ApiOutput::from_json(const json& j) {
    if (j.is_object() && j.contains("error")) {
        ApiOutput out;
        out.error = j.at("error").is_null() ? "" : j.at("error").get<std::string>();
        if (out.error.empty()) out.response = j.value("response", json());
        return out;
    }
    if (j.is_string()) {
        json inner = json::parse(j.get<std::string>(), nullptr, false);
        return ApiOutput::success(inner.is_discarded() ? j : inner);
    }
    return ApiOutput::success(j);
}

void SimEnvironment::register_function(SimFunction fn) {
    if (functions_.count(fn.name)) {
        throw DuplicateNameError("function already registered: " + fn.name);
    }
    functions_.emplace(fn.name, std::move(fn));
}

bool SimEnvironment::has(const std::string& api_name) const {
    return functions_.count(api_name) > 0;
}

std::vector<std::string> SimEnvironment::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : functions_) out.push_back(name);
    return out;
}

const SimFunction& SimEnvironment::function(const std::string& api_name) const {
    auto it = functions_.find(api_name);
    if (it == functions_.end()) {
        throw UnknownFunctionError("unknown function: " + api_name);
    }
    return it->second;
}

ApiOutput SimEnvironment::execute(const ApiCall& call) {
    const SimFunction& fn = function(call.api_name);
    if (!call.input.is_object()) {
        return ApiOutput::failure("input must be an object");
    }
    for (const auto& [key, _] : call.input.items()) {
        bool declared = false;
        for (const auto& p : fn.params) {
            if (p.name == key) { declared = true; break; }
        }
        if (!declared) {
            return ApiOutput::failure("got an unexpected keyword argument '" +
                                      key + "'");
        }
    }
    std::vector<std::string> missing;
    for (const auto& p : fn.params) {
        if (p.required && !call.input.contains(p.name)) missing.push_back(p.name);
    }
    if (!missing.empty()) {
        std::string msg = "missing " + std::to_string(missing.size()) +
                          " required positional argument" +
                          (missing.size() == 1 ? "" : "s") + ": ";
        for (size_t i = 0; i < missing.size(); ++i) {
            if (i > 0) msg += i + 1 == missing.size() ? " and " : ", ";
            msg += "'" + missing[i] + "'";
        }
        return ApiOutput::failure(msg);
    }
    return fn.handler(call.input);
}

SimEnvironment SimEnvironment::from_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open sim manifest: " + path.string());
    json manifest = json::parse(in, nullptr, false);
    if (manifest.is_discarded()) {
        throw SchemaError("sim manifest is not valid JSON: " + path.string());
    }
    return from_manifest_json(manifest);
}

SimEnvironment SimEnvironment::from_manifest_json(const json& manifest) {
    SimEnvironment env;
    for (const auto& f : manifest.at("functions")) {
        SimFunction fn;
        fn.tool = f.value("tool", "");
        fn.name = f.at("name").get<std::string>();
        for (const auto& p : f.value("params", json::array())) {
            fn.params.push_back({p.at("name").get<std::string>(),
                                 p.value("type", "string"),
                                 p.value("required", true)});
        }
        const json rows = f.value("responses", json::array());
        const json fallback = f.value("default_response", json());
        const std::string name = fn.name;
        fn.handler = [rows, fallback, name](const json& input) -> ApiOutput {
            for (const auto& row : rows) {
                if (json_equal_numeric(row.at("input"), input)) {
                    return ApiOutput::success(row.at("response"));
                }
            }
            if (!fallback.is_null()) return ApiOutput::success(fallback);
            return ApiOutput::failure("no simulated response for this input of " +
                                      name);
        };
        env.register_function(std::move(fn));
    }
    return env;
}

} // namespace apigraph
