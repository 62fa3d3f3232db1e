#include "apigraph/provider.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>

#include <openssl/evp.h>

#include "apigraph/errors.hpp"

namespace apigraph {

json ChatRequest::to_json() const {
    json msgs = json::array();
    for (const auto& m : messages) {
        msgs.push_back({{"role", m.role}, {"text", m.text}});
    }
    return {{"prompt_id", prompt_id},
            {"messages", msgs},
            {"temperature", temperature}};
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string cache_key(const std::string& provider_id, const ChatRequest& req) {
    return sha256_hex(provider_id + "\n" + canonical_dump(req.to_json()));
}

std::vector<double> trigram_embed(const std::string& text) {
    if (text.empty()) throw Error("trigram_embed: empty text");
    constexpr size_t kDim = 64;
    std::vector<double> v(kDim, 0.0);
    const std::string padded = "  " + text + "  ";
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
        // FNV-1a over the 3-byte window.
        std::uint64_t h = 1469598103934665603ull;
        for (size_t j = 0; j < 3; ++j) {
            h ^= static_cast<unsigned char>(padded[i + j]);
            h *= 1099511628211ull;
        }
        v[h % kDim] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0;
        return v;
    }
    for (double& x : v) x /= norm;
    return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

ChatResponse ScriptedProvider::chat(const ChatRequest& request) {
    const std::string digest = cache_key(id(), request);
    if (auto it = by_digest_.find(digest); it != by_digest_.end()) {
        return {it->second, false};
    }
    std::string haystack = request.prompt_id;
    for (const auto& m : request.messages) haystack += "\n" + m.text;
    for (const Rule& r : rules_) {
        if (r.prompt_id != request.prompt_id) continue;
        bool ok = true;
        for (const auto& s : r.contains) {
            if (haystack.find(s) == std::string::npos) { ok = false; break; }
        }
        for (const auto& s : r.not_contains) {
            if (!ok) break;
            if (haystack.find(s) != std::string::npos) ok = false;
        }
        if (ok) return {r.text, false};
    }
    if (auto it = defaults_.find(request.prompt_id); it != defaults_.end()) {
        return {it->second, false};
    }
    if (strict_) {
        throw ScriptMissError("no fixture for prompt '" + request.prompt_id +
                              "' digest " + digest);
    }
    return {"{}", false};
}

std::vector<double> ScriptedProvider::embed(const std::string& text) {
    return trigram_embed(text);
}

void ScriptedProvider::add_fixture(const std::string& digest,
                                   const std::string& text) {
    by_digest_[digest] = text;
}

void ScriptedProvider::add_rule(const std::string& prompt_id,
                                std::vector<std::string> contains,
                                std::string text,
                                std::vector<std::string> not_contains) {
    rules_.push_back({prompt_id, std::move(contains), std::move(not_contains),
                      std::move(text)});
}

void ScriptedProvider::add_default(const std::string& prompt_id,
                                   const std::string& text) {
    defaults_[prompt_id] = text;
}

void ScriptedProvider::load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fixture file: " + path.string());
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text")) {
            throw SchemaError("bad fixture record", line_no);
        }
        const std::string text = j.at("text").is_string()
                                     ? j.at("text").get<std::string>()
                                     : canonical_dump(j.at("text"));
        if (j.contains("digest")) {
            add_fixture(j.at("digest").get<std::string>(), text);
        } else if (j.value("default", false)) {
            add_default(j.at("prompt_id").get<std::string>(), text);
        } else {
            add_rule(j.at("prompt_id").get<std::string>(),
                     j.value("contains", std::vector<std::string>{}), text,
                     j.value("not_contains", std::vector<std::string>{}));
        }
    }
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto file = dir_ / (key + ".json");
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j.at("response").get<std::string>();
}

void ResponseCache::put(const std::string& key, const json& request,
                        const std::string& response) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto file = dir_ / (key + ".json");
    if (std::filesystem::exists(file)) {
        std::ifstream in(file);
        json existing = json::parse(in, nullptr, false);
        if (!existing.is_discarded() &&
            existing.at("response").get<std::string>() != response) {
            throw CacheConflictError("conflicting response for cache key " + key);
        }
        return;
    }
    const auto tmp = dir_ / (key + ".json.tmp");
    {
        std::ofstream out(tmp);
        out << json{{"request", request}, {"response", response}}.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, file);
}

ChatResponse CachingProvider::chat(const ChatRequest& request) {
    const std::string key = cache_key(inner_->id(), request);
    if (auto hit = cache_->get(key)) {
        return {*hit, true};
    }
    ChatResponse resp = inner_->chat(request);
    cache_->put(key, request.to_json(), resp.text);
    return {resp.text, false};
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string model,
                                   std::string embedding_model)
    : base_url_(std::move(base_url)),
      model_(std::move(model)),
      embedding_model_(std::move(embedding_model)) {
    if (const char* key = std::getenv("GOAT_API_KEY")) api_key_ = key;
}

json chat_json(Provider& provider, ChatRequest request) {
    ChatResponse first = provider.chat(request);
    if (auto parsed = try_parse_json_reply(first.text)) return *parsed;
    request.messages.push_back(
        {"user", "Remember: ONLY return the dictionary as your output. "
                 "DO NOT include any other words."});
    ChatResponse second = provider.chat(request);
    return parse_json_reply(second.text);
}

} // namespace apigraph
