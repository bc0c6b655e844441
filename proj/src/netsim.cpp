#include "tmbft/netsim.hpp"

#include <algorithm>
#include <cassert>

#include "tmbft/repeated.hpp"

namespace tmbft {

Simulator::Simulator(RunConfig cfg, std::unique_ptr<Adversary> adversary)
    : cfg_(std::move(cfg)), adversary_(std::move(adversary)), rng_(cfg_.seed) {
    cfg_.validate();
    seen_.resize(cfg_.rosterSize);
    nodes_.resize(cfg_.rosterSize);
    traceRec(kNoProcess, TraceRecord::Kind::Meta, runConfigToJson(cfg_));

    std::vector<ProcessId> oneShotValidators;
    for (int i = 0; i < cfg_.n; ++i) oneShotValidators.push_back(i);
    for (ProcessId p = 0; p < cfg_.rosterSize; ++p) {
        if (cfg_.isByzantine(p)) continue;
        if (cfg_.mode == RunMode::OneShot) {
            bool isValidator =
                std::find(oneShotValidators.begin(), oneShotValidators.end(), p) !=
                oneShotValidators.end();
            if (isValidator)
                nodes_[p] = std::make_unique<OneShotNode>(*this, p, oneShotValidators);
        } else {
            nodes_[p] = std::make_unique<RepeatedNode>(*this, p);
        }
    }
    if (adversary_) adversary_->attach(*this);
}

Simulator::~Simulator() = default;

uint64_t Simulator::traceRec(ProcessId p, TraceRecord::Kind k, Json body) {
    uint64_t id = trace_.append(now_, p, k, std::move(body));
    if (adversary_) {
        TraceRecord copy = trace_.records()[id];
        adversary_->onTrace(copy);
    }
    return id;
}

Digest Simulator::registerBlock(const Block& b) {
    Digest d = blocks_.add(b);
    if (tracedBlocks_.insert(d).second) {
        traceRec(kNoProcess, TraceRecord::Kind::Note,
                 Json{{"op", "block"},
                      {"digest", hexDigest(d)},
                      {"h", b.height},
                      {"parent", hexDigest(b.parentHash)},
                      {"payload", b.payload},
                      {"last_commit", b.lastCommit}});
    }
    return d;
}

void Simulator::registerGrant(Digest block, const RewardGrant& grant) {
    ledger_.registerGrant(block, grant);
    traceRec(kNoProcess, TraceRecord::Kind::Reward,
             Json{{"op", "grant"},
                  {"block", hexDigest(block)},
                  {"reward_h", grant.rewardHeight},
                  {"set", grant.rewarded}});
}

void Simulator::outputDecided(ProcessId p, Height h, const Value& v) {
    traceRec(p, TraceRecord::Kind::Decide,
             Json{{"scope", "output"}, {"h", h}, {"v", valueToJson(v)}});
    if (v.isBlock() && activatedOutputs_.insert(h).second) {
        ledger_.activate(v.digest());
        traceRec(kNoProcess, TraceRecord::Kind::Reward,
                 Json{{"op", "activate"}, {"block", hexDigest(v.digest())}, {"h", h}});
    }
}

bool Simulator::bothCorrect(ProcessId a, ProcessId b) const {
    return !cfg_.isByzantine(a) && !cfg_.isByzantine(b);
}

bool Simulator::authenticate(const ConsensusMessage& msg, ProcessId claimedSigner) const {
    auto it = provenance_.find(msg.id());
    return it != provenance_.end() && it->second == msg.signer &&
           msg.signer == claimedSigner;
}

Tick Simulator::resolveDeliveryTick(const Emission& e, ProcessId recipient) {
    Tick tau = cfg_.effectiveTau();
    bool self = recipient == e.emitter;
    bool cc = bothCorrect(e.emitter, recipient);
    bool bounded = cc && e.time >= tau && !self;
    // Pre-GST default policy: mostly prompt, with a seeded tail up to the
    // cap, so adversarial-looking selective lag shows up in fuzz schedules.
    Tick t;
    if (self) {
        t = e.time;
    } else if (e.time >= tau) {
        t = e.time + drawRange(rng_, 1, cfg_.delta);
    } else if (drawRange(rng_, 0, 4) == 0) {
        t = e.time + drawRange(rng_, 1, cfg_.maxPreGstDelay);
    } else {
        t = e.time + drawRange(rng_, 1, std::min(cfg_.delta * 2, cfg_.maxPreGstDelay));
    }
    if (adversary_) {
        DeliveryPlan plan = adversary_->planDelivery(e, recipient);
        switch (plan.kind) {
            case DeliveryPlan::Kind::Default: break;
            case DeliveryPlan::Kind::At:
                t = std::max(plan.at,
                             cfg_.isByzantine(e.emitter) || self ? e.time : e.time + 1);
                break;
            case DeliveryPlan::Kind::Park:
                if (!bounded) {
                    parked_[{e.id, recipient}] = true;
                    traceRec(recipient, TraceRecord::Kind::Note,
                             Json{{"op", "parked"}, {"emission", e.id}});
                    return -1;
                }
                break;  // post-GST correct-to-correct cannot be parked
            case DeliveryPlan::Kind::Omit:
                if (cfg_.isByzantine(e.emitter)) {
                    traceRec(recipient, TraceRecord::Kind::Note,
                             Json{{"op", "omitted"}, {"emission", e.id}});
                    return -1;
                }
                break;  // correct senders reach every correct process
        }
    }
    if (bounded) t = std::min(t, e.time + cfg_.delta);
    return t;
}

void Simulator::scheduleDelivery(const Emission& e, ProcessId recipient, Tick at) {
    Event ev;
    ev.time = at;
    ev.klass = 0;
    ev.seq = ++seq_;
    ev.target = recipient;
    ev.msg = e.msg;
    ev.emissionId = e.id;
    queue_.push(std::move(ev));
}

void Simulator::broadcast(ProcessId emitter, const ConsensusMessage& msg, bool relay) {
    if (!relay) {
        if (msg.signer != emitter) {
            // Unforgeable signatures: emitting under another id is rejected.
            traceRec(emitter, TraceRecord::Kind::Note,
                     Json{{"op", "forgery_rejected"}, {"msg", messageToJson(msg)}});
            return;
        }
        provenance_.emplace(msg.id(), msg.signer);
    } else if (!provenance_.count(msg.id())) {
        traceRec(emitter, TraceRecord::Kind::Note,
                 Json{{"op", "relay_of_unknown_rejected"}, {"msg", messageToJson(msg)}});
        return;
    }
    Emission e;
    e.id = emissions_.size();
    e.emitter = emitter;
    e.msg = msg;
    e.time = now_;
    e.relay = relay;
    emissions_.push_back(e);
    traceRec(emitter, TraceRecord::Kind::Emit,
             Json{{"emission", e.id},
                  {"relay", relay},
                  {"msg", messageToJson(msg)}});
    for (ProcessId r = 0; r < cfg_.rosterSize; ++r) {
        if (r == emitter) {
            // One-shot messages self-deliver inside the state machine at
            // emission; commits go through the queue so the delay model sees
            // them (zero delay unless an adversary stretches it).
            if (relay || msg.kind != MsgKind::Commit) continue;
        }
        Tick at = resolveDeliveryTick(e, r);
        if (at >= 0) scheduleDelivery(e, r, at);
    }
}

void Simulator::injectByzantine(ProcessId byz, const ConsensusMessage& msg,
                                const std::map<ProcessId, Tick>& deliveries) {
    assert(cfg_.isByzantine(byz));
    if (msg.signer != byz) {
        traceRec(byz, TraceRecord::Kind::Note,
                 Json{{"op", "forgery_rejected"}, {"msg", messageToJson(msg)}});
        return;
    }
    provenance_.emplace(msg.id(), msg.signer);
    Emission e;
    e.id = emissions_.size();
    e.emitter = byz;
    e.msg = msg;
    e.time = now_;
    e.relay = false;
    emissions_.push_back(e);
    traceRec(byz, TraceRecord::Kind::Emit,
             Json{{"emission", e.id}, {"relay", false}, {"msg", messageToJson(msg)}});
    for (const auto& [recipient, at] : deliveries) {
        if (recipient < 0 || recipient >= cfg_.rosterSize || recipient == byz) continue;
        scheduleDelivery(e, recipient, std::max(at, now_));
    }
}

void Simulator::releaseParked(uint64_t emissionId, ProcessId recipient, Tick at) {
    auto it = parked_.find({emissionId, recipient});
    if (it == parked_.end()) return;
    parked_.erase(it);
    traceRec(recipient, TraceRecord::Kind::Note,
             Json{{"op", "released"}, {"emission", emissionId}});
    scheduleDelivery(emissions_[emissionId], recipient, std::max(at, now_));
}

void Simulator::wakeAt(Tick t) {
    Event ev;
    ev.time = std::max(t, now_);
    ev.klass = 2;
    ev.seq = ++seq_;
    ev.target = kNoProcess;
    queue_.push(std::move(ev));
}

void Simulator::scheduleTimer(ProcessId p, TimerKind kind, Tick duration, uint64_t gen) {
    Event ev;
    ev.time = now_ + duration;
    ev.klass = 1;
    ev.seq = ++seq_;
    ev.target = p;
    ev.timerKind = kind;
    ev.timerGen = gen;
    queue_.push(std::move(ev));
}

void Simulator::processDelivery(const Event& ev) {
    ProcessId self = ev.target;
    if (cfg_.isByzantine(self)) {
        traceRec(self, TraceRecord::Kind::Deliver,
                 Json{{"emission", ev.emissionId}, {"msg", messageToJson(ev.msg)}});
        if (adversary_) adversary_->onByzantineDeliver(self, ev.msg);
        return;
    }
    Digest id = ev.msg.id();
    if (!seen_[self].insert(id).second) {
        traceRec(self, TraceRecord::Kind::Drop, Json{{"emission", ev.emissionId}});
        return;
    }
    traceRec(self, TraceRecord::Kind::Deliver,
             Json{{"emission", ev.emissionId}, {"msg", messageToJson(ev.msg)}});
    // Best-effort broadcast: re-broadcast every first delivery verbatim, with
    // the original signer preserved.
    if (ev.msg.signer != self) broadcast(self, ev.msg, true);
    if (nodes_[self]) nodes_[self]->onDeliver(ev.msg);
}

bool Simulator::horizonReached() {
    if (cfg_.mode == RunMode::OneShot && cfg_.horizonRounds > 0) {
        for (ProcessId p = 0; p < cfg_.rosterSize; ++p)
            if (nodes_[p] && nodes_[p]->maxRoundEntered() > cfg_.horizonRounds)
                return true;
    }
    if (cfg_.mode == RunMode::Repeated && cfg_.horizonHeights > 0) {
        bool all = true;
        for (ProcessId p = 0; p < cfg_.rosterSize; ++p)
            if (nodes_[p] && nodes_[p]->outputsProduced() < cfg_.horizonHeights)
                all = false;
        if (all) return true;
    }
    return false;
}

void Simulator::run() {
    if (adversary_) adversary_->onStart();
    for (auto& n : nodes_)
        if (n) n->start();
    while (!queue_.empty()) {
        Event ev = queue_.top();
        if (ev.time >= cfg_.horizonTicks) {
            stoppedAtHorizon_ = true;
            break;
        }
        queue_.pop();
        now_ = ev.time;
        if (ev.klass == 0) {
            processDelivery(ev);
        } else if (ev.klass == 1) {
            traceRec(ev.target, TraceRecord::Kind::Timer,
                     Json{{"op", "fired"},
                          {"kind", timerKindName(ev.timerKind)},
                          {"gen", ev.timerGen}});
            if (nodes_[ev.target]) nodes_[ev.target]->onTimer(ev.timerKind, ev.timerGen);
        } else {
            if (adversary_) adversary_->onWake(now_);
        }
        if (horizonReached()) {
            stoppedAtHorizon_ = true;
            break;
        }
    }
    if (queue_.empty() && !stoppedAtHorizon_) {
        traceRec(kNoProcess, TraceRecord::Kind::Note, Json{{"op", "quiescent"}});
    }
    if (!parked_.empty()) {
        traceRec(kNoProcess, TraceRecord::Kind::Note,
                 Json{{"op", "in_flight_at_end"}, {"count", parked_.size()}});
    }
    traceRec(kNoProcess, TraceRecord::Kind::Note, Json{{"op", "end"}, {"t", now_}});
}

}  // namespace tmbft
