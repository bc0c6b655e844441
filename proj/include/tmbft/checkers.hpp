#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmbft/config.hpp"
#include "tmbft/fairness.hpp"
#include "tmbft/trace.hpp"

namespace tmbft {

// One evaluated run property. Statuses are checker-specific strings
// ("OK"/"VIOLATED", "PASS"/"FAIL", "absent"/"satisfied(...)", audit verdicts)
// so scenario expectations can match them directly.
struct Verdict {
    std::string name;
    std::string status;
    std::string detail;
    std::vector<uint64_t> witnesses;  // trace record ids backing the verdict
    Json toJson() const;
};

// Everything the checkers need, extracted from a trace in one pass. Built
// either from a live run or from a trace file (the meta record carries the
// configuration).
struct RunFacts {
    RunConfig cfg;

    struct DecideRec {
        ProcessId p;
        Height h;
        Round r;
        Value v;
        Tick time;
        uint64_t rec;
        bool output;  // repeated output vs one-shot decision
    };
    struct LockRec {
        ProcessId p;
        Height h;
        Round r;
        Value to;
        Round llr;
        std::string reason;
        Tick time;
        uint64_t rec;
    };
    struct EntryRec {
        ProcessId p;
        Height h;
        Round r;
        Value locked;
        Round llr;
        std::optional<Round> polcr;
        Tick time;
        uint64_t rec;
    };
    struct EmitRec {
        uint64_t emission;
        ProcessId emitter;
        bool relay;
        ConsensusMessage msg;
        Tick time;
        uint64_t rec;
    };
    struct DeliverRec {
        ProcessId p;
        uint64_t emission;
        Tick time;
        uint64_t rec;
    };
    struct TimerRec {
        ProcessId p;
        std::string op;
        std::string kind;
        Tick value;  // duration for set, new timeout for bump
        Height h;
        Tick time;
        uint64_t rec;
    };

    std::vector<DecideRec> decides;
    std::vector<LockRec> locks;
    std::vector<EntryRec> entries;
    std::vector<EmitRec> emits;
    std::vector<DeliverRec> delivers;
    std::vector<TimerRec> timers;
    std::map<Digest, Block> blocks;
    std::map<Height, std::map<ProcessId, std::vector<ProcessId>>> validatorSets;
    std::map<std::string, Digest> symbols;  // scenario-exported value names
    std::vector<std::pair<uint64_t, ConsensusMessage>> equivocationEvidence;
    std::vector<std::pair<uint64_t, uint64_t>> drops;  // record id, emission id
    RewardLedger ledger;
    std::map<ProcessId, std::vector<std::pair<Height, Value>>> outputs;
    Tick endTime = 0;

    std::vector<ProcessId> validatorsAt(Height h) const;
    static RunFacts extract(const RunConfig& cfg, const Trace& trace);
};

// Assumption-T monitor: per-round check that the proposer is correct and that
// fewer than n/3 - f correct processes hold locks at rounds >= the proposer's
// last-locked round (snapshots taken at round entry).
struct TMonitorResult {
    bool satisfied = false;
    Height height = 0;
    Round round = 0;
    uint64_t witness = 0;  // proposer's round-entry record
    std::vector<std::pair<Round, bool>> perRound;  // round -> T-satisfying (first height)
};
TMonitorResult assumptionTMonitor(const RunFacts& facts, Round fromRound);

bool assumptionTHolds(const RunFacts& facts, Round fromRound);

// Evaluates every module invariant over a finished trace.
std::vector<Verdict> checkProperties(const RunFacts& facts);

// Golden-state assertions for scripted scenarios. Spec entries:
// {"p": 1, "end_of_round": 2, "locked": "B"|"nil", "llr": 1, "polcr": 1|null}
// or {"p": 0, "decided": "B"} — symbolic block names resolved via the trace's
// exported symbol table.
Verdict checkGoldenStates(const RunFacts& facts, const Json& goldens);

Json verdictsToJson(const std::vector<Verdict>& vs);

}  // namespace tmbft
