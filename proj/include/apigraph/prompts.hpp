#pragma once

#include <string>
#include <vector>

#include "apigraph/provider.hpp"

namespace apigraph::prompts {

// Pipeline prompt template ids.
inline constexpr const char* kParseDoc = "parse_doc";
inline constexpr const char* kEdgeLlmFilter = "edge_llm_filter";
inline constexpr const char* kEdgeFirstCall = "edge_first_call";
inline constexpr const char* kEdgeSubsequentCall = "edge_subsequent_call";
inline constexpr const char* kEdgeVerify = "edge_verify";
inline constexpr const char* kMakeFirstCall = "make_first_call";
inline constexpr const char* kMakeCallStep1 = "make_call_step1";
inline constexpr const char* kMakeCallStep2 = "make_call_step2";
inline constexpr const char* kSubinstruction = "subinstruction";
inline constexpr const char* kUserQuery = "user_query";
inline constexpr const char* kFinalResponse = "final_response";
inline constexpr const char* kJudgeSuccess = "judge_success";

// Agent template ids.
inline constexpr const char* kAgentGlobalPlan = "agent_global_plan";
inline constexpr const char* kAgentMakeCall = "agent_make_call";
inline constexpr const char* kAgentAnswer = "agent_answer";
inline constexpr const char* kAgentReactStep = "agent_react_step";
inline constexpr const char* kAgentNextSubinstruction = "agent_next_subinstruction";
inline constexpr const char* kAgentSubinstructionPlan = "agent_subinstruction_plan";
inline constexpr const char* kAgentSelectCall = "agent_select_call";

bool is_registered(const std::string& prompt_id);
const std::vector<std::string>& registered_ids();

// Template text for a registered id; throws Error for unknown ids.
const std::string& get(const std::string& prompt_id);

// Builds the standard two-message request: the template as the system turn
// and the serialized payload as the user turn.
ChatRequest make_request(const std::string& prompt_id,
                         const std::string& payload, double temperature = 0.0);

} // namespace apigraph::prompts
