#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace semweave {

// One resolution event. kind is one of: goal, ruleSelected, factMatched,
// builtinInvoked, builtinReturned, depthCut, memoHit. Unset fields are
// omitted from the JSON record; durationMs appears only on
// builtinReturned and is the single nondeterministic field.
struct TraceEvent {
    std::string kind;
    int depth = 0;
    std::string goal;             // goal, factMatched, depthCut, memoHit
    std::string rule;             // ruleSelected, builtinInvoked, builtinReturned
    std::uint64_t call_id = 0;    // builtinInvoked, builtinReturned
    std::string status;           // builtinReturned: "ok" or "error"
    std::string stage;            // builtinReturned errors: guard|extract|connector|lift
    std::string detail;           // matched triple or error message
    double duration_ms = -1.0;    // builtinReturned

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = kind;
        j["depth"] = depth;
        if (!goal.empty()) j["goal"] = goal;
        if (!rule.empty()) j["rule"] = rule;
        if (call_id != 0) j["callId"] = call_id;
        if (!status.empty()) j["status"] = status;
        if (!stage.empty()) j["stage"] = stage;
        if (!detail.empty()) j["detail"] = detail;
        if (duration_ms >= 0) j["durationMs"] = duration_ms;
        return j;
    }
};

// Line-delimited JSON, one event per line.
inline void write_trace(std::ostream& os, const std::vector<TraceEvent>& events) {
    for (const auto& e : events) os << e.to_json().dump() << "\n";
}

}  // namespace semweave
