#pragma once

#include <map>
#include <memory>
#include <random>
#include <set>

#include "tmbft/netsim.hpp"

namespace tmbft {

// Builds the adversary named by the config ("none" yields a null adversary:
// pure model-policy delays).
std::unique_ptr<Adversary> makeAdversary(const RunConfig& cfg);

// Seeded Byzantine strategy generator mixing silent, equivocating,
// selective-send, stale-round replay and invalid-proposal behaviours, all as
// well-typed messages under the adversary's own signer ids.
class RandomByzantine : public Adversary {
public:
    explicit RandomByzantine(const RunConfig& cfg);
    void onByzantineDeliver(ProcessId byz, const ConsensusMessage& m) override;

private:
    enum class Action { Silent, Equivocate, Selective, StaleReplay, InvalidProposal };
    Action drawAction();
    void act(ProcessId byz, Height h, Round r);
    void splitBrainAct(ProcessId byz, Height h, Round r, const ConsensusMessage& m);
    std::vector<ProcessId> randomSubset(const std::vector<ProcessId>& from, size_t min);
    Value inventBlock(Height h);

    RunConfig cfg_;
    std::mt19937_64 rng_;
    std::map<std::tuple<ProcessId, Height, Round>, bool> acted_;
    std::map<ProcessId, std::map<std::pair<Height, Round>, Value>> seenProposals_;

    // split-brain playbook state, per Byzantine process
    struct Brain {
        bool active = false;
        Value anchor;            // the first proposal it saw
        Round lastTurn = 0;      // its previous proposer turn
    };
    std::map<ProcessId, Brain> brains_;
};

// Stage manager for the scripted schedules: watches the trace for step
// entries and timer deadlines, controls per-message delays (parking messages
// where the schedule needs them withheld) and drives the Byzantine process's
// just-in-time emissions.
class ScenarioDirector : public Adversary {
protected:
    struct Deadline {
        Tick at = -1;
        Round round = 0;
    };
    void onTrace(const TraceRecord& rec) final;
    virtual void onTimerSet(ProcessId p, TimerKind kind, Round r, Tick deadline,
                            Height h) {
        (void)p; (void)kind; (void)r; (void)deadline; (void)h;
    }
    virtual void onStepEntry(ProcessId p, Height h, Round r, Step s) {
        (void)p; (void)h; (void)r; (void)s;
    }
    virtual void onRoundEntry(ProcessId p, Height h, Round r) {
        (void)p; (void)h; (void)r;
    }
    virtual void onEmitObserved(const Emission&) {}
    virtual void onGrantObserved(Height rewardHeight) { (void)rewardHeight; }
    virtual void onHeightEntry(ProcessId p, Height h) { (void)p; (void)h; }

    void exportSymbol(const std::string& name, Digest d);
    // Parked-copy bookkeeping: key -> emission ids, so held contents can be
    // released when the schedule calls for them.
    std::map<std::pair<Digest, ProcessId>, std::vector<uint64_t>> parkedByContent_;
    std::map<uint64_t, Digest> emissionContent_;
    std::set<std::string> exported_;
};

// Reproduces the selective-delivery schedule that makes the legacy unlock
// rule violate One-Shot Agreement (p1 decides the first proposal, p2 a later
// one). With the corrected rule the same schedule keeps every decision on the
// first proposal.
class AgreementViolationDirector : public ScenarioDirector {
public:
    explicit AgreementViolationDirector(const RunConfig& cfg) : cfg_(cfg) {}
    DeliveryPlan planDelivery(const Emission& e, ProcessId rcpt) override;
    void onTimerSet(ProcessId p, TimerKind kind, Round r, Tick deadline, Height h) override;
    void onStepEntry(ProcessId p, Height h, Round r, Step s) override;
    void onRoundEntry(ProcessId p, Height h, Round r) override;
    void onEmitObserved(const Emission& e) override;

private:
    void injectOnce(const std::string& key, const ConsensusMessage& m,
                    const std::map<ProcessId, Tick>& plan);

    RunConfig cfg_;
    static constexpr ProcessId kP1 = 0, kP2 = 1, kP3 = 2, kByz = 3;
    Value blockB_;            // p1's round-1 proposal
    std::map<Round, Value> roundProposal_;
    std::set<std::string> done_;
    std::map<std::pair<ProcessId, Round>, bool> inPrecommit_;
    std::map<std::pair<ProcessId, Round>, bool> voted_;
    std::set<std::pair<ProcessId, Round>> roundEntered_;
};

// Reproduces the livelock schedule: round 1 locks the first proposer's value
// at p1 only; afterwards the Byzantine validator hands a just-in-time prevote
// to exactly one validator per odd round, so locks leapfrog forever and no
// proposer ever satisfies the termination side-condition.
class LivelockDirector : public ScenarioDirector {
public:
    explicit LivelockDirector(const RunConfig& cfg) : cfg_(cfg) {}
    DeliveryPlan planDelivery(const Emission& e, ProcessId rcpt) override;
    void onTimerSet(ProcessId p, TimerKind kind, Round r, Tick deadline, Height h) override;
    void onEmitObserved(const Emission& e) override;

private:
    RunConfig cfg_;
    static constexpr ProcessId kP1 = 0, kP2 = 1, kP3 = 2, kByz = 3;
    std::map<Round, Value> roundProposal_;
    std::map<std::pair<ProcessId, Round>, Tick> prevoteDeadline_;
    std::set<Round> injected_;
    std::map<Round, Digest> jitContent_;  // round -> p4 prevote content id
};

// Slow-commit schedule: one correct validator's commit messages (including its
// own zero-delay copy) arrive a fixed D after emission, past the commit
// windows of early heights.
class FairnessDelayDirector : public ScenarioDirector {
public:
    explicit FairnessDelayDirector(const RunConfig& cfg);
    DeliveryPlan planDelivery(const Emission& e, ProcessId rcpt) override;

private:
    RunConfig cfg_;
    ProcessId slow_;
    Tick delay_;
};

// Corollary schedule: in an asynchronous run the scheduler defers one correct
// validator's commit for each height until after the next height's reward
// snapshot was taken, however large the timeouts grow.
class AsyncDeferDirector : public ScenarioDirector {
public:
    explicit AsyncDeferDirector(const RunConfig& cfg);
    DeliveryPlan planDelivery(const Emission& e, ProcessId rcpt) override;
    void onGrantObserved(Height rewardHeight) override;

private:
    RunConfig cfg_;
    ProcessId victim_;
    std::map<Height, std::vector<std::pair<uint64_t, ProcessId>>> held_;
    std::set<Height> released_;
};

}  // namespace tmbft
