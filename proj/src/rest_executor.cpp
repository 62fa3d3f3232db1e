#include <httplib.h>

#include "apigraph/errors.hpp"
#include "apigraph/tool_env.hpp"

namespace apigraph {

RestExecutor::RestExecutor(std::string base_url, std::string auth_header,
                           int max_in_flight)
    : base_url_(std::move(base_url)),
      auth_header_(std::move(auth_header)),
      slots_(max_in_flight) {}

bool RestExecutor::has(const std::string& api_name) const {
    return api_name.find(' ') != std::string::npos;
}

std::vector<std::string> RestExecutor::names() const { return {}; }

namespace {

std::string query_encode(const json& value) {
    std::string s = value.is_string() ? value.get<std::string>() : value.dump();
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

} // namespace

ApiOutput RestExecutor::execute(const ApiCall& call) {
    const auto space = call.api_name.find(' ');
    if (space == std::string::npos) {
        throw UnknownFunctionError("REST api_name must be 'METHOD /path': " +
                                   call.api_name);
    }
    const std::string method = call.api_name.substr(0, space);
    std::string path = call.api_name.substr(space + 1);

    json remaining = call.input.is_object() ? call.input : json::object();
    // Substitute {var} segments from the input map.
    for (size_t open = path.find('{'); open != std::string::npos;
         open = path.find('{', open)) {
        const size_t close = path.find('}', open);
        if (close == std::string::npos) break;
        const std::string var = path.substr(open + 1, close - open - 1);
        if (!remaining.contains(var)) {
            return ApiOutput::failure("missing path variable '" + var + "'");
        }
        const std::string value = query_encode(remaining.at(var));
        remaining.erase(var);
        path.replace(open, close - open + 1, value);
        open += value.size();
    }

    slots_.acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{slots_};

    httplib::Client cli(base_url_);
    cli.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!auth_header_.empty()) {
        const auto colon = auth_header_.find(':');
        if (colon != std::string::npos) {
            headers.emplace(auth_header_.substr(0, colon),
                            auth_header_.substr(colon + 1));
        }
    }

    httplib::Result res;
    if (method == "GET" || method == "DELETE") {
        std::string qs;
        for (const auto& [k, v] : remaining.items()) {
            qs += (qs.empty() ? "?" : "&") + k + "=" + query_encode(v);
        }
        res = method == "GET" ? cli.Get(path + qs, headers)
                              : cli.Delete(path + qs, headers);
    } else {
        const std::string body = remaining.dump();
        if (method == "POST") {
            res = cli.Post(path, headers, body, "application/json");
        } else if (method == "PUT") {
            res = cli.Put(path, headers, body, "application/json");
        } else if (method == "PATCH") {
            res = cli.Patch(path, headers, body, "application/json");
        } else {
            return ApiOutput::failure("unsupported HTTP method: " + method);
        }
    }

    if (!res) {
        return ApiOutput::failure("transport failure: " +
                                  httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        return ApiOutput::failure("HTTP " + std::to_string(res->status) + ": " +
                                  res->body.substr(0, 200));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        // Non-JSON body: wrapped and flagged rather than dropped.
        return ApiOutput::success(
            {{"raw_text", res->body}, {"non_json_response", true}});
    }
    return ApiOutput::success(parsed);
}

} // namespace apigraph
