#pragma once

#include <stdexcept>
#include <string>

namespace apigraph {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// provider
struct TransportError : Error { using Error::Error; };
struct ScriptMissError : Error { using Error::Error; };
struct ProviderFormatError : Error { using Error::Error; };
struct CacheConflictError : Error { using Error::Error; };

// api_spec / dataset_io
struct ArityMismatchError : Error { using Error::Error; };
struct SchemaError : Error {
    SchemaError(const std::string& msg, long line_no = -1)
        : Error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
    long line;
};

// tool_env
struct UnknownFunctionError : Error { using Error::Error; };
struct DuplicateNameError : Error { using Error::Error; };

// dep_graph
struct EmptyLabelError : Error { using Error::Error; };

// sampler
struct CycleError : Error { using Error::Error; };

// synth
struct ExtractionError : Error { using Error::Error; };
struct MissingRequiredError : Error { using Error::Error; };
struct LeakError : Error { using Error::Error; };

// dataset_io
struct SpanError : Error { using Error::Error; };

// retriever
struct EmptyCorpusError : Error { using Error::Error; };
struct FingerprintMismatchError : Error { using Error::Error; };

// agent
struct PlanParseError : Error { using Error::Error; };

// eval
struct JudgeFormatError : Error { using Error::Error; };

// cli
struct ConfigError : Error {
    ConfigError(const std::string& field_path, const std::string& msg)
        : Error("config error at '" + field_path + "': " + msg), field(field_path) {}
    std::string field;
};

} // namespace apigraph
