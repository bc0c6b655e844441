#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tmbft/message.hpp"
#include "tmbft/oneshot.hpp"

namespace tmbft {

using Json = nlohmann::ordered_json;

// One line of a run trace. Records are append-only and time-monotone; every
// kind below is consumed by at least one property checker or report.
struct TraceRecord {
    enum class Kind : uint8_t {
        Meta,        // run configuration header
        Emit,        // message broadcast (origin or relay)
        Deliver,     // message delivered at a process
        Drop,        // duplicate delivery discarded
        Timer,       // set / fired / cancelled / stale
        State,       // round entry, step entry, phase notes, height entry
        Lock,        // lockedBlock transition with reason
        Decide,      // one-shot decision or repeated output
        Reward,      // reward grant registration / activation
        Evidence,    // quarantined message
        Audit,       // end-of-run verdicts
        Note,        // free-form diagnostics (quiescence, adversary marks)
    };

    uint64_t id = 0;
    Tick time = 0;
    ProcessId process = kNoProcess;
    Kind kind = Kind::Note;
    Json body;  // kind-specific fields, insertion-ordered for stable output
};

const char* traceKindName(TraceRecord::Kind k);

Json messageToJson(const ConsensusMessage& m);
ConsensusMessage messageFromJson(const Json& j);
Json valueToJson(const Value& v);
Value valueFromJson(const Json& j);

class Trace {
public:
    uint64_t append(Tick t, ProcessId p, TraceRecord::Kind k, Json body);
    const std::vector<TraceRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    const TraceRecord& operator[](size_t i) const { return records_[i]; }

    void writeJsonl(const std::string& path) const;
    static Trace readJsonl(const std::string& path);
    std::string toJsonl() const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace tmbft
