#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apigraph/errors.hpp"

namespace apigraph {

using json = nlohmann::json;

// Canonical serialization: nlohmann objects keep keys sorted, so dump() is
// already order-independent for maps. Kept as a named helper so every cache
// key and artifact writer goes through one place.
inline std::string canonical_dump(const json& j) { return j.dump(); }

// Numeric-aware equality: 150000 == 150000.0, everything else strict.
bool json_equal_numeric(const json& a, const json& b);

// Scans `text` for the first balanced JSON object, tolerating ```json fences
// and surrounding prose. Throws ProviderFormatError when nothing parses.
json parse_json_reply(const std::string& text);

// Like parse_json_reply but returns nullopt instead of throwing.
std::optional<json> try_parse_json_reply(const std::string& text);

// Collects every scalar value in `j` (descending into objects/arrays).
std::vector<json> flatten_values(const json& j);

// True when `needle` (a scalar) occurs among the flattened values of
// `haystack`, or as a substring of any string leaf when needle is a string.
bool json_contains_value(const json& haystack, const json& needle);

} // namespace apigraph
