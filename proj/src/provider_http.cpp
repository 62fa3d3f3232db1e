#include <cmath>

#include <httplib.h>

#include "apigraph/errors.hpp"
#include "apigraph/provider.hpp"

namespace apigraph {

namespace {

json post_json(const std::string& base_url, const std::string& path,
               const std::string& api_key, const json& body) {
    httplib::Client cli(base_url);
    cli.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key);
    }
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError("HTTP request to " + base_url + path + " failed: " +
                             httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("HTTP " + std::to_string(res->status) + " from " +
                             path + ": " + res->body.substr(0, 200));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw TransportError("non-JSON body from " + path);
    }
    return parsed;
}

} // namespace

ChatResponse HttpChatProvider::chat(const ChatRequest& request) {
    json msgs = json::array();
    for (const auto& m : request.messages) {
        msgs.push_back({{"role", m.role}, {"content", m.text}});
    }
    json body = {{"model", model_},
                 {"messages", msgs},
                 {"temperature", request.temperature}};
    json reply = post_json(base_url_, "/v1/chat/completions", api_key_, body);
    try {
        std::string text =
            reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (text.empty()) throw TransportError("empty completion text");
        return {text, false};
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected completion schema: ") +
                             e.what());
    }
}

std::vector<double> HttpChatProvider::embed(const std::string& text) {
    if (text.empty()) throw Error("embed: empty text");
    const std::string model =
        embedding_model_.empty() ? model_ : embedding_model_;
    json body = {{"model", model}, {"input", text}};
    json reply = post_json(base_url_, "/v1/embeddings", api_key_, body);
    std::vector<double> v;
    try {
        v = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected embedding schema: ") +
                             e.what());
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return v;
}

} // namespace apigraph
