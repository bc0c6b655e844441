#include "tmbft/adversary.hpp"

#include <cassert>
#include <stdexcept>

namespace tmbft {

std::unique_ptr<Adversary> makeAdversary(const RunConfig& cfg) {
    const std::string& k = cfg.adversary.kind;
    if (k == "none") return nullptr;
    if (k == "random") return std::make_unique<RandomByzantine>(cfg);
    if (k == "script_agreement") return std::make_unique<AgreementViolationDirector>(cfg);
    if (k == "script_livelock") return std::make_unique<LivelockDirector>(cfg);
    if (k == "script_fairness_delay") return std::make_unique<FairnessDelayDirector>(cfg);
    if (k == "script_async_defer") return std::make_unique<AsyncDeferDirector>(cfg);
    throw std::invalid_argument("unknown adversary kind: " + k);
}

// ---------------------------------------------------------------------------
// ScenarioDirector

void ScenarioDirector::onTrace(const TraceRecord& rec) {
    const Json& b = rec.body;
    switch (rec.kind) {
        case TraceRecord::Kind::Emit: {
            Emission e;
            e.id = b.at("emission").get<uint64_t>();
            e.emitter = rec.process;
            e.relay = b.at("relay").get<bool>();
            e.msg = messageFromJson(b.at("msg"));
            e.time = rec.time;
            emissionContent_[e.id] = e.msg.id();
            onEmitObserved(e);
            break;
        }
        case TraceRecord::Kind::Note: {
            if (b.value("op", "") == "parked") {
                uint64_t eid = b.at("emission").get<uint64_t>();
                auto it = emissionContent_.find(eid);
                if (it != emissionContent_.end())
                    parkedByContent_[{it->second, rec.process}].push_back(eid);
            }
            break;
        }
        case TraceRecord::Kind::Timer: {
            if (b.value("op", "") != "set") break;
            std::string kind = b.value("kind", "");
            TimerKind tk = kind == "propose"  ? TimerKind::Propose
                           : kind == "prevote" ? TimerKind::Prevote
                                               : TimerKind::Commit;
            onTimerSet(rec.process, tk, b.value("r", Round{0}),
                       b.value("deadline", Tick{0}), b.value("h", Height{0}));
            break;
        }
        case TraceRecord::Kind::State: {
            std::string what = b.value("what", "");
            if (what == "step") {
                std::string s = b.value("step", "");
                Step step = s == "PROPOSE"     ? Step::Propose
                            : s == "PREVOTE"   ? Step::Prevote
                            : s == "PRECOMMIT" ? Step::Precommit
                                               : Step::Decided;
                onStepEntry(rec.process, b.value("h", Height{0}), b.value("r", Round{0}),
                            step);
            } else if (what == "round_entry") {
                onRoundEntry(rec.process, b.value("h", Height{0}), b.value("r", Round{0}));
            } else if (what == "height_entry") {
                onHeightEntry(rec.process, b.value("h", Height{0}));
            }
            break;
        }
        case TraceRecord::Kind::Reward: {
            if (b.value("op", "") == "grant")
                onGrantObserved(b.value("reward_h", Height{0}));
            break;
        }
        default: break;
    }
}

void ScenarioDirector::exportSymbol(const std::string& name, Digest d) {
    if (!exported_.insert(name).second) return;
    sim_->traceRec(kNoProcess, TraceRecord::Kind::Note,
                   Json{{"op", "symbol"}, {"name", name}, {"digest", hexDigest(d)}});
}

// ---------------------------------------------------------------------------
// AgreementViolationDirector (legacy unlock-rule counterexample)

DeliveryPlan AgreementViolationDirector::planDelivery(const Emission& e, ProcessId rcpt) {
    const ConsensusMessage& m = e.msg;
    if (m.kind == MsgKind::Prevote) {
        // Round 1: p3 must fall one prevote short and time out unlocked.
        if (m.round == 1 && m.signer == kP2 && rcpt == kP3) return DeliveryPlan::park();
        // p4's round-2 prevote reaches p2 only when round 3's unlock check
        // needs a full round-2 quorum.
        if (m.round == 2 && m.signer == kByz && rcpt == kP2) return DeliveryPlan::park();
        return DeliveryPlan::atTick(e.time + 1);
    }
    if (m.kind == MsgKind::Precommit) {
        // The precommit that let p1 decide must never reach p2 or p3.
        if (m.round == 1 && m.signer == kByz && rcpt != kP1) return DeliveryPlan::park();
        // p4's round-6 precommit singles out p2; p3 stays one short of the
        // decision quorum.
        if (m.round == 6 && m.signer == kByz && rcpt == kP3) return DeliveryPlan::park();
        return DeliveryPlan::atTick(e.time + 1);
    }
    return DeliveryPlan::atTick(e.time + 1);
}

void AgreementViolationDirector::injectOnce(const std::string& key,
                                            const ConsensusMessage& m,
                                            const std::map<ProcessId, Tick>& plan) {
    if (!done_.insert(key).second) return;
    sim_->injectByzantine(kByz, m, plan);
}

void AgreementViolationDirector::onEmitObserved(const Emission& e) {
    if (e.relay || e.msg.kind != MsgKind::Propose) {
        if (!e.relay && e.msg.kind == MsgKind::Prevote && e.msg.round == 6)
            voted_[{e.msg.signer, 6}] = true;
        if (voted_[{kP2, 6}] && voted_[{kP3, 6}] && roundProposal_.count(6)) {
            injectOnce("pv6",
                       makePrevote(kByz, 1, 6, roundProposal_[6], kNoRound),
                       {{kP2, sim_->now() + 1}, {kP3, sim_->now() + 1}});
        }
        return;
    }
    roundProposal_[e.msg.round] = e.msg.value;
    if (e.msg.round == 1 && e.msg.signer == kP1) {
        blockB_ = e.msg.value;
        exportSymbol("B", e.msg.value.digest());
    }
    if (e.msg.round == 6 && e.msg.signer == kP2 && !(e.msg.value == blockB_))
        exportSymbol("B'", e.msg.value.digest());
}

void AgreementViolationDirector::onTimerSet(ProcessId p, TimerKind kind, Round r,
                                            Tick deadline, Height) {
    if (kind == TimerKind::Prevote && p == kP3 && r == 2) {
        injectOnce("pv2", makePrevote(kByz, 1, 2, blockB_, kNoRound),
                   {{kP3, deadline - 1}});
    }
}

void AgreementViolationDirector::onStepEntry(ProcessId p, Height, Round r, Step s) {
    if (s == Step::Precommit && p == kP1 && r == 1) {
        injectOnce("pc1", makePrecommit(kByz, 1, 1, blockB_), {{kP1, sim_->now() + 1}});
    }
    if (s == Step::Precommit && (p == kP2 || p == kP3)) {
        inPrecommit_[{p, r}] = true;
        if (inPrecommit_[{kP2, r}] && inPrecommit_[{kP3, r}]) {
            if (r == 3) {
                // Round-3 prevote from p4, delivered after both lock checks
                // passed; it completes the round-3 quorum that later unlock
                // waits consult.
                injectOnce("pv3", makePrevote(kByz, 1, 3, blockB_, kNoRound),
                           {{kP2, sim_->now() + 1}, {kP3, sim_->now() + 1}});
            }
            if (r >= 2 && r <= 5) {
                injectOnce("pcnil" + std::to_string(r),
                           makePrecommit(kByz, 1, r, Value::nil()),
                           {{kP2, sim_->now() + 2}, {kP3, sim_->now() + 2}});
            }
            if (r == 6 && roundProposal_.count(6)) {
                injectOnce("pc6", makePrecommit(kByz, 1, 6, roundProposal_[6]),
                           {{kP2, sim_->now() + 1}});
            }
        }
    }
    if (s == Step::Prevote && p == kP2 && r == 3) {
        // p2 just entered the unlock wait on round 2; hand it the parked
        // third round-2 prevote.
        ConsensusMessage m = makePrevote(kByz, 1, 2, blockB_, kNoRound);
        auto it = parkedByContent_.find({m.id(), kP2});
        if (it != parkedByContent_.end()) {
            for (uint64_t eid : it->second)
                sim_->releaseParked(eid, kP2, sim_->now() + 1);
            parkedByContent_.erase(it);
        }
    }
}

void AgreementViolationDirector::onRoundEntry(ProcessId p, Height, Round r) {
    if (r != 4 || (p != kP2 && p != kP3)) return;
    roundEntered_.insert({p, r});
    // p4 is round 4's proposer; it re-proposes B claiming a round-3 lock.
    if (roundEntered_.count({kP2, 4}) && roundEntered_.count({kP3, 4})) {
        injectOnce("prop4", makePropose(kByz, 1, 4, blockB_, 3),
                   {{kP2, sim_->now() + 1}, {kP3, sim_->now() + 1}});
    }
}

// ---------------------------------------------------------------------------
// LivelockDirector (termination counterexample)

DeliveryPlan LivelockDirector::planDelivery(const Emission& e, ProcessId rcpt) {
    const ConsensusMessage& m = e.msg;
    if (m.kind == MsgKind::Propose && m.round == 1 && rcpt == kP3)
        return DeliveryPlan::park();  // round 1 is pre-GST; p3 sees no proposal
    if (m.kind == MsgKind::Prevote && m.signer == kByz) {
        if (jitContent_.count(m.round) && jitContent_[m.round] == m.id()) {
            ProcessId favored = m.round % 4 == 1 ? kP1 : kP3;
            if (rcpt == favored || rcpt == kByz) return DeliveryPlan::atTick(e.time + 1);
            // Pre-GST copies may be withheld outright; round 1 relies on it.
            if (e.time < cfg_.tau) return DeliveryPlan::park();
            // Relayed copies land only after the recipient's prevote timer
            // fired, within the post-GST bound.
            auto it = prevoteDeadline_.find({rcpt, m.round});
            if (it == prevoteDeadline_.end())
                throw std::logic_error("livelock: recipient deadline unknown r=" + std::to_string(m.round) + " rcpt=" + std::to_string(rcpt) + " t=" + std::to_string(e.time));
            Tick at = std::max(it->second + 1, e.time + 1);
            if (at > e.time + cfg_.delta)
                throw std::logic_error("livelock: delta too small for the schedule");
            return DeliveryPlan::atTick(at);
        }
    }
    return DeliveryPlan::atTick(e.time + 1);
}

void LivelockDirector::onEmitObserved(const Emission& e) {
    if (e.relay || e.msg.kind != MsgKind::Propose) return;
    if (!roundProposal_.count(e.msg.round)) {
        roundProposal_[e.msg.round] = e.msg.value;
        if (e.msg.round == 1) exportSymbol("v1", e.msg.value.digest());
        if (e.msg.round == 2) exportSymbol("v2", e.msg.value.digest());
        if (e.msg.round == 3) exportSymbol("v3", e.msg.value.digest());
    }
}

void LivelockDirector::onTimerSet(ProcessId p, TimerKind kind, Round r, Tick deadline,
                                  Height) {
    if (kind != TimerKind::Prevote) return;
    prevoteDeadline_[{p, r}] = deadline;
    ProcessId favored = r % 4 == 1 ? kP1 : r % 4 == 3 ? kP3 : kNoProcess;
    if (favored == kNoProcess || p != favored) return;
    if (injected_.count(r)) return;
    auto it = roundProposal_.find(r);
    if (it == roundProposal_.end()) return;  // proposer absent this round
    injected_.insert(r);
    ConsensusMessage m = makePrevote(kByz, 1, r, it->second, kNoRound);
    jitContent_[r] = m.id();
    sim_->injectByzantine(kByz, m, {{favored, deadline - 1}});
}

// ---------------------------------------------------------------------------
// FairnessDelayDirector (slow-commit schedule)

FairnessDelayDirector::FairnessDelayDirector(const RunConfig& cfg) : cfg_(cfg) {
    slow_ = cfg.adversary.params.value("slow", cfg.rosterSize - 1);
    delay_ = cfg.adversary.params.value("commit_delay", Tick{15});
}

DeliveryPlan FairnessDelayDirector::planDelivery(const Emission& e, ProcessId rcpt) {
    if (e.msg.kind == MsgKind::Commit && e.msg.signer == slow_)
        return DeliveryPlan::atTick(e.time + delay_);
    return DeliveryPlan::atTick(rcpt == e.emitter ? e.time : e.time + 1);
}

// ---------------------------------------------------------------------------
// AsyncDeferDirector (Corollary schedule, no Byzantine process needed)

AsyncDeferDirector::AsyncDeferDirector(const RunConfig& cfg) : cfg_(cfg) {
    victim_ = cfg.adversary.params.value("victim", cfg.rosterSize - 1);
}

DeliveryPlan AsyncDeferDirector::planDelivery(const Emission& e, ProcessId rcpt) {
    if (e.msg.kind == MsgKind::Commit && e.msg.signer == victim_) {
        if (released_.count(e.msg.height))
            return DeliveryPlan::atTick(e.time + 1);  // too late to matter
        held_[e.msg.height].push_back({e.id, rcpt});
        return DeliveryPlan::park();
    }
    return DeliveryPlan::atTick(rcpt == e.emitter ? e.time : e.time + 1);
}

void AsyncDeferDirector::onGrantObserved(Height rewardHeight) {
    if (rewardHeight <= 0) return;
    if (!released_.insert(rewardHeight).second) return;
    auto it = held_.find(rewardHeight);
    if (it == held_.end()) return;
    for (const auto& [eid, rcpt] : it->second)
        sim_->releaseParked(eid, rcpt, sim_->now() + 1);
    held_.erase(it);
}

// ---------------------------------------------------------------------------
// RandomByzantine

RandomByzantine::RandomByzantine(const RunConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed ^ 0x9e3779b97f4a7c15ull) {
    const StrategyMix& m = cfg_.adversary.mix;
    int total = m.silent + m.equivocate + m.selectiveSend + m.staleReplay +
                m.invalidProposal + m.splitBrain;
    if (total <= 0) return;
    // A process either runs the long-game split-brain playbook for the whole
    // run or draws one of the per-round behaviours each round.
    for (ProcessId b : cfg_.byzantine)
        brains_[b].active = drawRange(rng_, 0, total - 1) < m.splitBrain;
}

RandomByzantine::Action RandomByzantine::drawAction() {
    const StrategyMix& m = cfg_.adversary.mix;
    int total =
        m.silent + m.equivocate + m.selectiveSend + m.staleReplay + m.invalidProposal;
    if (total <= 0) return Action::Silent;
    int x = static_cast<int>(drawRange(rng_, 0, total - 1));
    if ((x -= m.silent) < 0) return Action::Silent;
    if ((x -= m.equivocate) < 0) return Action::Equivocate;
    if ((x -= m.selectiveSend) < 0) return Action::Selective;
    if ((x -= m.staleReplay) < 0) return Action::StaleReplay;
    return Action::InvalidProposal;
}

std::vector<ProcessId> RandomByzantine::randomSubset(const std::vector<ProcessId>& from,
                                                     size_t minSize) {
    std::vector<ProcessId> out;
    for (ProcessId p : from)
        if (drawRange(rng_, 0, 1)) out.push_back(p);
    while (out.size() < minSize && out.size() < from.size()) {
        ProcessId p = from[drawRange(rng_, 0, static_cast<int64_t>(from.size()) - 1)];
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

Value RandomByzantine::inventBlock(Height h) {
    Block b;
    b.height = h;
    b.parentHash = rng_();  // dangling parent: never valid
    b.payload = {rng_() | 1};
    return Value::block(sim_->registerBlock(b));
}

void RandomByzantine::onByzantineDeliver(ProcessId byz, const ConsensusMessage& m) {
    if (m.kind == MsgKind::Commit) return;
    if (m.kind == MsgKind::Propose)
        seenProposals_[byz][{m.height, m.round}] = m.value;
    else if (m.value.isBlock())
        seenProposals_[byz].try_emplace({m.height, m.round}, m.value);
    if (brains_[byz].active) {
        splitBrainAct(byz, m.height, m.round, m);
        return;
    }
    act(byz, m.height, m.round);
}

void RandomByzantine::splitBrainAct(ProcessId byz, Height h, Round r,
                                    const ConsensusMessage& m) {
    if (h != 1) return;  // the playbook targets one consensus instance
    Brain& brain = brains_[byz];
    std::vector<ProcessId> vset;
    for (int i = 0; i < cfg_.n; ++i) vset.push_back(i);
    std::vector<ProcessId> correct = cfg_.correct();
    Tick base = sim_->now();
    auto toAll = [&](Tick d) {
        std::map<ProcessId, Tick> plan;
        for (ProcessId p : correct) plan[p] = base + d;
        return plan;
    };

    bool myTurn = proposerAt(vset, h, r, cfg_.proposerOffset) == byz;
    auto key = std::make_tuple(byz, h, r);
    if (myTurn && !acted_.count(key)) {
        acted_[key] = true;
        if (brain.anchor.isBlock()) {
            // Re-propose the anchor claiming a PoLC at the previous turn:
            // the legacy rule unlocks holders of older locks on it. The
            // matching prevote lands late so nobody re-locks live, but the
            // stores end up holding a full quorum for the claimed round.
            std::optional<Round> polcr;
            if (brain.lastTurn >= 1) polcr = brain.lastTurn;
            sim_->injectByzantine(byz, makePropose(byz, h, r, brain.anchor, polcr),
                                  toAll(1));
            sim_->injectByzantine(byz, makePrevote(byz, h, r, brain.anchor, kNoRound),
                                  toAll(40));
        }
        sim_->injectByzantine(byz, makePrecommit(byz, h, r, Value::nil()), toAll(10));
        brain.lastTurn = r;
        return;
    }
    if (m.kind != MsgKind::Propose || acted_.count(key) || myTurn) {
        // Rounds whose proposer left produce no proposal; keep the survivors'
        // precommit waits draining with nil votes.
        auto nilKey = std::make_tuple(byz, h, -r);
        if (!myTurn && m.kind != MsgKind::Propose && !acted_.count(key) &&
            !acted_.count(nilKey)) {
            acted_[nilKey] = true;
            sim_->injectByzantine(byz, makePrecommit(byz, h, r, Value::nil()),
                                  toAll(8));
        }
        return;
    }
    acted_[key] = true;
    Value w = m.value;
    if (!brain.anchor.isBlock()) brain.anchor = w;
    ProcessId target = correct[drawRange(rng_, 0, static_cast<int64_t>(correct.size()) - 1)];
    // Early rounds: no prevote help, so partial locks hinge on network lag.
    // Later rounds: fully back any fresh value, never the anchor, so the
    // survivors can converge on a competing block once unlocked.
    if (r >= 3 && !(w == brain.anchor))
        sim_->injectByzantine(byz, makePrevote(byz, h, r, w, kNoRound), toAll(2));
    sim_->injectByzantine(byz, makePrecommit(byz, h, r, w), {{target, base + 2}});
    ConsensusMessage nilPc = makePrecommit(byz, h, r, Value::nil());
    std::map<ProcessId, Tick> others;
    for (ProcessId p : correct)
        if (p != target) others[p] = base + 2;
    sim_->injectByzantine(byz, nilPc, others);
}

void RandomByzantine::act(ProcessId byz, Height h, Round r) {
    auto key = std::make_tuple(byz, h, r);
    if (acted_.count(key)) return;
    acted_[key] = true;
    Action a = drawAction();
    std::vector<ProcessId> correct = cfg_.correct();
    Tick base = sim_->now();
    auto planFor = [&](const std::vector<ProcessId>& rs) {
        std::map<ProcessId, Tick> plan;
        for (ProcessId p : rs)
            plan[p] = base + drawRange(rng_, 1, std::max<Tick>(2, cfg_.delta));
        return plan;
    };
    Value seen = Value::nil();
    auto sp = seenProposals_[byz].find({h, r});
    if (sp != seenProposals_[byz].end()) seen = sp->second;

    switch (a) {
        case Action::Silent:
            break;
        case Action::Equivocate: {
            Value alt = inventBlock(h);
            auto half = randomSubset(correct, 1);
            std::vector<ProcessId> rest;
            for (ProcessId p : correct)
                if (std::find(half.begin(), half.end(), p) == half.end())
                    rest.push_back(p);
            sim_->injectByzantine(byz, makePrevote(byz, h, r, seen, kNoRound),
                                  planFor(half));
            sim_->injectByzantine(byz, makePrevote(byz, h, r, alt, kNoRound),
                                  planFor(rest));
            sim_->injectByzantine(byz, makePrecommit(byz, h, r, seen), planFor(half));
            sim_->injectByzantine(byz, makePrecommit(byz, h, r, Value::nil()),
                                  planFor(rest));
            break;
        }
        case Action::Selective: {
            auto subset = randomSubset(correct, 1);
            sim_->injectByzantine(byz, makePrevote(byz, h, r, seen, kNoRound),
                                  planFor(subset));
            sim_->injectByzantine(byz, makePrecommit(byz, h, r, seen),
                                  planFor(randomSubset(correct, 0)));
            break;
        }
        case Action::StaleReplay: {
            Round stale = std::max(1, r - 1);
            sim_->injectByzantine(byz, makePrevote(byz, h, stale, seen, kNoRound),
                                  planFor(randomSubset(correct, 1)));
            sim_->injectByzantine(byz, makePrecommit(byz, h, stale, seen),
                                  planFor(randomSubset(correct, 1)));
            break;
        }
        case Action::InvalidProposal: {
            // Proposals for this process's next proposer turn. Half the time
            // a dangling block, half a valid-looking re-proposal of a seen
            // block with a fabricated lock round: the latter drives unlock
            // checks on honest validators.
            std::vector<ProcessId> vset;
            for (int i = 0; i < cfg_.n; ++i) vset.push_back(i);
            Round turn = r + 1;
            while (turn < r + cfg_.n + 1 &&
                   proposerAt(vset, h, turn, cfg_.proposerOffset) != byz)
                ++turn;
            if (drawRange(rng_, 0, 1) || !seen.isBlock()) {
                sim_->injectByzantine(byz,
                                      makePropose(byz, h, turn, inventBlock(h), kNoRound),
                                      planFor(correct));
            } else {
                std::optional<Round> polcr;
                if (turn > 1) polcr = turn - 1;
                sim_->injectByzantine(byz, makePropose(byz, h, turn, seen, polcr),
                                      planFor(correct));
            }
            break;
        }
    }
}

}  // namespace tmbft
