#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmbft/oneshot.hpp"
#include "tmbft/trace.hpp"

namespace tmbft {

enum class RunMode : uint8_t { OneShot, Repeated };
enum class NetMode : uint8_t { Synchronous, EventuallySynchronous, Asynchronous };
enum class MechanismVariant : uint8_t { Original, Modulable, ModulableF1Filter, DelayedX };
enum class SelectorKind : uint8_t { Static, Rotating };

const char* netModeName(NetMode m);
const char* mechanismName(MechanismVariant m);

// Relative weights of the Byzantine behaviours mixed by the seeded random
// adversary. split_brain is the guided strategy that plays the legacy
// unlock-rule attack: isolate one validator's decision, force unlocks with
// lock-claiming re-proposals, then back a different block.
struct StrategyMix {
    int silent = 1;
    int equivocate = 1;
    int selectiveSend = 1;
    int staleReplay = 1;
    int invalidProposal = 1;
    int splitBrain = 0;
};

struct AdversaryConfig {
    // none | random | script_agreement | script_livelock | script_fairness_delay |
    // script_async_defer
    std::string kind = "none";
    StrategyMix mix;
    Json params = Json::object();
};

struct RunConfig {
    RunMode mode = RunMode::OneShot;
    int rosterSize = 4;            // processes in the run
    int n = 4;                     // validator-set size
    std::vector<ProcessId> byzantine;
    int f = 1;                     // declared fault tolerance
    bool unsafeFaults = false;     // permit f >= n/3 rosters for experiments

    NetMode netMode = NetMode::Synchronous;
    Tick tau = 0;                  // GST; ignored for SYNCHRONOUS (0) and
                                   // ASYNCHRONOUS (beyond horizon)
    Tick delta = 3;                // post-GST delivery bound
    Tick maxPreGstDelay = 40;      // cap for the default pre-GST delay draw

    Tick timeoutPropose = 10;
    Tick timeoutPrevote = 10;
    Tick timeoutCommit = 5;
    UnlockRule unlockRule = UnlockRule::Corrected;
    bool acceptAnyProposer = false;
    int proposerOffset = 0;

    MechanismVariant mechanism = MechanismVariant::Original;
    int delayX = 1;                // x for the delayed-reward mechanism

    SelectorKind selector = SelectorKind::Static;
    std::vector<int> stakes;       // per-roster stake for the rotating selector

    uint64_t seed = 0;
    Tick horizonTicks = 4000;
    int horizonRounds = 0;         // one-shot mode: stop after this many rounds
    int horizonHeights = 0;        // repeated mode: stop after this many outputs
    int tailWindow = 10;           // bounded check window for condition 4bis

    AdversaryConfig adversary;

    std::vector<ProcessId> roster() const;
    std::vector<ProcessId> correct() const;
    bool isByzantine(ProcessId p) const;
    Tick effectiveTau() const;     // resolves SYNCHRONOUS / ASYNCHRONOUS modes
    void validate() const;         // throws std::invalid_argument
};

Json runConfigToJson(const RunConfig& c);
RunConfig runConfigFromJson(const Json& j);

// A scenario is a run configuration plus the verdicts it is expected to
// produce; `expect` entries are matched against the run report.
struct Scenario {
    std::string name;
    std::string description;
    RunConfig config;
    Json expect = Json::object();
};

Json scenarioToJson(const Scenario& s);
Scenario scenarioFromJson(const Json& j);
Scenario loadScenarioFile(const std::string& path);

}  // namespace tmbft
