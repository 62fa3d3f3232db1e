#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "apigraph/json_util.hpp"

namespace apigraph {

struct ChatMessage {
    std::string role;
    std::string text;
};

struct ChatRequest {
    std::string prompt_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;

    json to_json() const;
};

struct ChatResponse {
    std::string text;
    bool cached = false;
};

std::string sha256_hex(const std::string& data);

// Digest of (provider id, canonicalized request). Requests differing only in
// map key order share one key because canonical_dump sorts object keys.
std::string cache_key(const std::string& provider_id, const ChatRequest& req);

/// Chat completion + text embedding backend.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
};

// Deterministic test embedder: character trigram counts hashed (FNV-1a) into
// 64 buckets, L2-normalized. Stable across platforms.
std::vector<double> trigram_embed(const std::string& text);
double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Scripted mock provider. Resolution order per chat request:
///   1. exact fixture keyed by the request digest,
///   2. first matching rule (prompt_id + contains/not_contains substrings,
///      in registration order),
///   3. per-prompt default reply.
/// In strict mode an unresolved request raises ScriptMissError; otherwise an
/// empty-object reply is returned. Performs no network I/O; embeddings come
/// from the trigram embedder. Treat as immutable once handed to the pipeline.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(bool strict = true) : strict_(strict) {}

    std::string id() const override { return "scripted"; }
    ChatResponse chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override;

    void add_fixture(const std::string& digest, const std::string& text);
    void add_rule(const std::string& prompt_id,
                  std::vector<std::string> contains, std::string text,
                  std::vector<std::string> not_contains = {});
    void add_default(const std::string& prompt_id, const std::string& text);

    // JSONL, one rule per line:
    //   {"prompt_id": ..., "contains": [...], "not_contains": [...], "text": ...}
    //   {"prompt_id": ..., "default": true, "text": ...}
    //   {"digest": ..., "text": ...}
    void load_fixtures(const std::filesystem::path& path);

private:
    struct Rule {
        std::string prompt_id;
        std::vector<std::string> contains;
        std::vector<std::string> not_contains;
        std::string text;
    };
    bool strict_;
    std::map<std::string, std::string> by_digest_;
    std::vector<Rule> rules_;
    std::map<std::string, std::string> defaults_;
};

/// OpenAI-compatible chat-completions endpoint. Credential read from the
/// GOAT_API_KEY environment variable.
class HttpChatProvider : public Provider {
public:
    HttpChatProvider(std::string base_url, std::string model,
                     std::string embedding_model = "");

    std::string id() const override { return "openai:" + model_; }
    ChatResponse chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override;

private:
    std::string base_url_;
    std::string model_;
    std::string embedding_model_;
    std::string api_key_;
};

/// One file per cache key under `dir`, holding the canonical request and the
/// response text. Write-once: a second different response for the same key is
/// rejected. Concurrent readers allowed; first-write serialized per process.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const json& request,
             const std::string& response);

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

/// Wraps a provider with a content-addressed response cache. Cache hits are
/// byte-identical to the first response for that key and flagged cached=true.
class CachingProvider : public Provider {
public:
    CachingProvider(std::shared_ptr<Provider> inner,
                    std::shared_ptr<ResponseCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::string id() const override { return inner_->id(); }
    ChatResponse chat(const ChatRequest& request) override;
    std::vector<double> embed(const std::string& text) override {
        return inner_->embed(text);
    }

private:
    std::shared_ptr<Provider> inner_;
    std::shared_ptr<ResponseCache> cache_;
};

// Issues the request and parses the reply as JSON. On a malformed reply,
// retries exactly once with a "return only JSON" reminder appended, then
// throws ProviderFormatError.
json chat_json(Provider& provider, ChatRequest request);

} // namespace apigraph
