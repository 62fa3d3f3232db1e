#include "apigraph/json_util.hpp"

namespace apigraph {

bool json_equal_numeric(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) {
        return a.get<double>() == b.get<double>();
    }
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return false;
            if (!json_equal_numeric(it.value(), b.at(it.key()))) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
            if (!json_equal_numeric(a[i], b[i])) return false;
        }
        return true;
    }
    return a == b;
}

namespace {

// Finds the end index (one past) of a balanced object starting at `start`,
// respecting string literals and escapes. Returns npos when unbalanced.
size_t balanced_end(const std::string& s, size_t start) {
    int depth = 0;
    bool in_string = false;
    for (size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

} // namespace

std::optional<json> try_parse_json_reply(const std::string& text) {
    for (size_t pos = text.find('{'); pos != std::string::npos;
         pos = text.find('{', pos + 1)) {
        size_t end = balanced_end(text, pos);
        if (end == std::string::npos) continue;
        json parsed = json::parse(text.substr(pos, end - pos), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    // Python-style dicts show up occasionally: retry with True/False fixed.
    std::string fixed = text;
    auto replace_all = [&fixed](const std::string& from, const std::string& to) {
        for (size_t p = fixed.find(from); p != std::string::npos;
             p = fixed.find(from, p + to.size())) {
            fixed.replace(p, from.size(), to);
        }
    };
    replace_all("True", "true");
    replace_all("False", "false");
    replace_all("None", "null");
    if (fixed != text) return try_parse_json_reply(fixed);
    return std::nullopt;
}

json parse_json_reply(const std::string& text) {
    auto parsed = try_parse_json_reply(text);
    if (!parsed) {
        throw ProviderFormatError("no JSON object found in provider reply: " +
                                  text.substr(0, 120));
    }
    return *parsed;
}

namespace {

void flatten_into(const json& j, std::vector<json>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            (void)k;
            flatten_into(v, out);
        }
    } else if (j.is_array()) {
        for (const auto& v : j) flatten_into(v, out);
    } else {
        out.push_back(j);
    }
}

} // namespace

std::vector<json> flatten_values(const json& j) {
    std::vector<json> out;
    flatten_into(j, out);
    return out;
}

bool json_contains_value(const json& haystack, const json& needle) {
    for (const json& leaf : flatten_values(haystack)) {
        if (json_equal_numeric(leaf, needle)) return true;
        if (needle.is_string() && leaf.is_string() &&
            leaf.get<std::string>().find(needle.get<std::string>()) !=
                std::string::npos) {
            return true;
        }
        // A numeric needle extracted from a stringified payload still counts.
        if (needle.is_number() && leaf.is_string()) {
            json inner = json::parse(leaf.get<std::string>(), nullptr, false);
            if (!inner.is_discarded() && json_contains_value(inner, needle)) {
                return true;
            }
        }
    }
    return false;
}

} // namespace apigraph
