#pragma once

#include <iosfwd>
#include <string>

#include "tmbft/checkers.hpp"
#include "tmbft/config.hpp"
#include "tmbft/scenarios.hpp"

namespace tmbft {

struct RunResult {
    RunConfig cfg;
    Trace trace;
    RunFacts facts;
    std::vector<Verdict> verdicts;
    Json report;  // config + verdicts + summary, stable field order
};

// Executes one simulation and evaluates every property checker over its
// trace. When outDir is non-empty, writes <tag>.trace.jsonl and
// <tag>.report.json under it.
RunResult runOne(const RunConfig& cfg, const std::string& outDir = "",
                 const std::string& tag = "run");

// Runs a scenario and compares the produced verdicts (and golden states)
// against its expectations. Returns 0 when every expectation matches
// (including expected violations), 1 otherwise.
int runScenario(const Scenario& sc, const std::string& outDir, std::ostream& log);

// Seeded fuzz campaign over a grid of rosters, network modes and strategy
// mixes. Zero-tolerance properties are aggregated; failing runs get their
// reproducer config persisted.
struct FuzzCampaign {
    uint64_t seedStart = 1;
    int runs = 100;
    std::vector<std::pair<int, int>> grid = {{4, 1}, {7, 2}};  // (n, f)
    std::vector<NetMode> modes = {NetMode::Synchronous, NetMode::EventuallySynchronous,
                                  NetMode::Asynchronous};
    UnlockRule unlockRule = UnlockRule::Corrected;
    RunMode runMode = RunMode::OneShot;
    StrategyMix mix;
    Tick horizonTicks = 3000;
    int horizonHeights = 5;
    Tick maxPreGstDelay = 30;

    Json toJson() const;
    static FuzzCampaign fromJson(const Json& j);
};

struct FuzzSummary {
    int runs = 0;
    int decided = 0;                       // runs where every correct process decided
    int tSatisfied = 0;                    // runs with a T-satisfying round
    int tSatisfiedAndDecided = 0;
    std::map<std::string, int> violations;  // property -> violating runs
    std::vector<Json> failures;             // reproducer configs
    Json toJson() const;
};

// Derives the per-run configuration for one fuzz index (exposed so tests can
// reproduce a single campaign member).
RunConfig fuzzRunConfig(const FuzzCampaign& fc, int index);

FuzzSummary runFuzz(const FuzzCampaign& fc, const std::string& outDir,
                    std::ostream& log);

// Loads a trace file (its meta record carries the config) and re-evaluates
// every checker.
std::vector<Verdict> checkTraceFile(const std::string& path, std::ostream& log);

Json buildReport(const RunConfig& cfg, const std::vector<Verdict>& verdicts,
                 const RunFacts& facts);

}  // namespace tmbft
