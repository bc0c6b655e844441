#pragma once

#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "tmbft/block.hpp"
#include "tmbft/config.hpp"
#include "tmbft/fairness.hpp"
#include "tmbft/oneshot.hpp"
#include "tmbft/trace.hpp"

namespace tmbft {

class Simulator;

// A message put on the wire, either an origin broadcast or a relay.
struct Emission {
    uint64_t id = 0;
    ProcessId emitter = kNoProcess;
    ConsensusMessage msg;
    Tick time = 0;
    bool relay = false;
};

// Per-recipient scheduling decision for one emission.
struct DeliveryPlan {
    enum class Kind : uint8_t {
        Default,  // model policy (seeded draw within the mode's bounds)
        At,       // deliver at the given tick (clamped to the model's bounds)
        Park,     // hold; the adversary may release it later
        Omit,     // never deliver (Byzantine senders only)
    };
    Kind kind = Kind::Default;
    Tick at = 0;

    static DeliveryPlan defaults() { return {}; }
    static DeliveryPlan atTick(Tick t) { return {Kind::At, t}; }
    static DeliveryPlan park() { return {Kind::Park, 0}; }
    static DeliveryPlan omit() { return {Kind::Omit, 0}; }
};

// Adversary hook surface: per-(message, recipient) delay control, Byzantine
// actor behaviour, trace observation for scripted schedules, and wake-ups.
class Adversary {
public:
    virtual ~Adversary() = default;
    virtual void attach(Simulator& sim) { sim_ = &sim; }
    virtual void onStart() {}
    virtual DeliveryPlan planDelivery(const Emission&, ProcessId /*recipient*/) {
        return DeliveryPlan::defaults();
    }
    virtual void onByzantineDeliver(ProcessId /*byz*/, const ConsensusMessage&) {}
    virtual void onTrace(const TraceRecord&) {}
    virtual void onWake(Tick) {}

protected:
    Simulator* sim_ = nullptr;
};

// A correct process's protocol logic (one-shot validator or repeated-consensus
// driver). Message dedup and relaying happen outside, in the simulator.
class Node {
public:
    virtual ~Node() = default;
    virtual void start() = 0;
    virtual void onDeliver(const ConsensusMessage& m) = 0;
    virtual void onTimer(TimerKind kind, uint64_t generation) = 0;
    virtual Round maxRoundEntered() const { return 0; }
    virtual Height outputsProduced() const { return 0; }
    virtual bool hasDecided() const { return false; }
};

class OneShotNode;
class RepeatedNode;

// Deterministic discrete-event simulator: clock, timers, best-effort
// broadcast with relay and dedup, delay models, Byzantine injection. Events
// at one tick are processed deliveries first, then timer firings, then
// adversary wake-ups; a seq counter breaks remaining ties.
class Simulator {
public:
    Simulator(RunConfig cfg, std::unique_ptr<Adversary> adversary);
    ~Simulator();

    void run();

    // Services used by nodes.
    Tick now() const { return now_; }
    void broadcast(ProcessId emitter, const ConsensusMessage& msg, bool relay);
    void scheduleTimer(ProcessId p, TimerKind kind, Tick duration, uint64_t gen);
    uint64_t traceRec(ProcessId p, TraceRecord::Kind k, Json body);
    Digest registerBlock(const Block& b);
    void registerGrant(Digest block, const RewardGrant& grant);
    void outputDecided(ProcessId p, Height h, const Value& v);

    // Adversary services.
    void injectByzantine(ProcessId byz, const ConsensusMessage& msg,
                         const std::map<ProcessId, Tick>& deliveries);
    void releaseParked(uint64_t emissionId, ProcessId recipient, Tick at);
    void wakeAt(Tick t);
    std::mt19937_64& rng() { return rng_; }

    const RunConfig& config() const { return cfg_; }
    const Trace& trace() const { return trace_; }
    Trace& mutableTrace() { return trace_; }
    const BlockStore& blocks() const { return blocks_; }
    BlockStore& mutableBlocks() { return blocks_; }
    const RewardLedger& ledger() const { return ledger_; }
    const Node* node(ProcessId p) const { return nodes_[p].get(); }
    bool stoppedAtHorizon() const { return stoppedAtHorizon_; }

    // Simulated signature check: the message content was really emitted by
    // the claimed signer at some earlier point of this run.
    bool authenticate(const ConsensusMessage& msg, ProcessId claimedSigner) const;

private:
    struct Event {
        Tick time;
        uint8_t klass;  // 0 delivery, 1 timer, 2 wake
        uint64_t seq;
        ProcessId target;
        ConsensusMessage msg;
        uint64_t emissionId = 0;
        TimerKind timerKind = TimerKind::Propose;
        uint64_t timerGen = 0;
        bool operator>(const Event& o) const {
            if (time != o.time) return time > o.time;
            if (klass != o.klass) return klass > o.klass;
            return seq > o.seq;
        }
    };

    void scheduleDelivery(const Emission& e, ProcessId recipient, Tick at);
    void processDelivery(const Event& ev);
    Tick resolveDeliveryTick(const Emission& e, ProcessId recipient);
    bool bothCorrect(ProcessId a, ProcessId b) const;
    bool horizonReached();

    RunConfig cfg_;
    std::unique_ptr<Adversary> adversary_;
    Tick now_ = 0;
    uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    std::vector<std::unique_ptr<Node>> nodes_;  // null for Byzantine processes
    std::vector<std::set<Digest>> seen_;        // per-process delivered contents
    std::vector<Emission> emissions_;
    std::map<Digest, ProcessId> provenance_;    // content id -> original signer
    std::map<std::pair<uint64_t, ProcessId>, bool> parked_;
    std::set<Digest> tracedBlocks_;
    std::set<Height> activatedOutputs_;
    Trace trace_;
    BlockStore blocks_;
    RewardLedger ledger_;
    std::mt19937_64 rng_;
    bool stoppedAtHorizon_ = false;
    friend class RepeatedNode;
    friend class OneShotNode;
};

}  // namespace tmbft
