#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <semaphore>
#include <string>
#include <vector>

#include "apigraph/json_util.hpp"

namespace apigraph {

struct ApiCall {
    std::string api_name;
    json input = json::object();

    json to_json() const { return {{"api_name", api_name}, {"input", input}}; }
};

/// Canonical execution envelope. error empty <=> response present.
struct ApiOutput {
    std::string error;
    json response;

    bool ok() const { return error.empty(); }

    static ApiOutput success(json response) {
        return {"", std::move(response)};
    }
    static ApiOutput failure(std::string error) {
        return {std::move(error), json()};
    }

    json to_json() const {
        json j = {{"error", error}};
        j["response"] = ok() ? response : json();
        return j;
    }
    // Accepts the envelope shape and, leniently, a raw JSON value (treated as
    // a successful response). Strings holding serialized JSON are unwrapped.
    static ApiOutput from_json(const json& j);
};

struct SimParam {
    std::string name;
    std::string type;
    bool required = true;
};

/// Pure simulated API function: same input, same output.
struct SimFunction {
    std::string tool;
    std::string name;
    std::vector<SimParam> params;
    std::function<ApiOutput(const json& input)> handler;
};

/// Executor contract shared by the simulated and REST environments.
class Environment {
public:
    virtual ~Environment() = default;
    virtual ApiOutput execute(const ApiCall& call) = 0;
    virtual bool has(const std::string& api_name) const = 0;
    virtual std::vector<std::string> names() const = 0;
};

/// Deterministic in-process environment. Immutable once registration is done;
/// execute is safe to call concurrently afterwards. In-band API failures
/// (missing/unexpected arguments, no table row) come back in the envelope's
/// error field; only an unregistered api_name throws.
class SimEnvironment : public Environment {
public:
    void register_function(SimFunction fn);

    ApiOutput execute(const ApiCall& call) override;
    bool has(const std::string& api_name) const override;
    std::vector<std::string> names() const override;

    const SimFunction& function(const std::string& api_name) const;

    // Manifest: {"functions": [{tool, name, params: [{name,type,required}],
    //   responses: [{input, response}], default_response?}]}
    // Rows match on numeric-aware input equality.
    static SimEnvironment from_manifest(const std::filesystem::path& path);
    static SimEnvironment from_manifest_json(const json& manifest);

private:
    std::map<std::string, SimFunction> functions_;
};

/// Maps api_name strings of the form "METHOD /path/{var}" onto HTTP requests:
/// path variables substituted from the input map, the remainder sent as query
/// parameters (GET/DELETE) or JSON body. Concurrent calls bounded by
/// max_in_flight.
class RestExecutor : public Environment {
public:
    RestExecutor(std::string base_url, std::string auth_header = "",
                 int max_in_flight = 4);

    ApiOutput execute(const ApiCall& call) override;
    bool has(const std::string& api_name) const override;
    std::vector<std::string> names() const override;

private:
    std::string base_url_;
    std::string auth_header_;
    std::counting_semaphore<64> slots_;
};

} // namespace apigraph
