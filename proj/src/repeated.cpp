#include "tmbft/repeated.hpp"

#include <algorithm>
#include <cassert>

namespace tmbft {

std::vector<ProcessId> selectValidators(const RunConfig& cfg, const ChainView& prefixTip,
                                        Height h) {
    std::vector<ProcessId> roster = cfg.roster();
    if (cfg.selector == SelectorKind::Static || cfg.n == cfg.rosterSize) {
        roster.resize(cfg.n);
        return roster;
    }
    // Stake-weighted deterministic draw keyed by the chain tip.
    std::vector<std::pair<uint64_t, ProcessId>> scored;
    for (ProcessId p : roster) {
        Fnv1a f;
        f.put(std::string("select"));
        f.put(prefixTip.tipDigest);
        f.put(h);
        f.put(p);
        uint64_t stake =
            cfg.stakes.empty() ? 1 : static_cast<uint64_t>(std::max(cfg.stakes[p], 0));
        scored.emplace_back(f.digest() * (stake + 1), p);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<ProcessId> out;
    for (int i = 0; i < cfg.n; ++i) out.push_back(scored[i].second);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Effect application shared by both node kinds.

namespace {

void applyMachineEffects(Simulator& sim, ProcessId self, OneShotMachine& machine,
                         Round& maxRound, const std::function<void(const Value&)>& onDecide) {
    for (Effect& e : machine.takeEffects()) {
        switch (e.kind) {
            case Effect::Kind::Broadcast:
                sim.broadcast(self, e.msg, false);
                break;
            case Effect::Kind::SetTimer:
                sim.traceRec(self, TraceRecord::Kind::Timer,
                             Json{{"op", "set"},
                                  {"kind", timerKindName(e.timer)},
                                  {"gen", e.generation},
                                  {"duration", e.duration},
                                  {"deadline", sim.now() + e.duration},
                                  {"h", machine.height()},
                                  {"r", machine.round()}});
                sim.scheduleTimer(self, e.timer, e.duration, e.generation);
                break;
            case Effect::Kind::CancelTimer:
                sim.traceRec(self, TraceRecord::Kind::Timer,
                             Json{{"op", "cancelled"}, {"kind", timerKindName(e.timer)}});
                break;
            case Effect::Kind::Decide:
                sim.traceRec(self, TraceRecord::Kind::Decide,
                             Json{{"scope", "oneshot"},
                                  {"h", machine.height()},
                                  {"r", e.round},
                                  {"v", valueToJson(e.value)}});
                onDecide(e.value);
                break;
            case Effect::Kind::RoundEntry:
                maxRound = std::max(maxRound, e.round);
                sim.traceRec(self, TraceRecord::Kind::State,
                             Json{{"what", "round_entry"},
                                  {"h", machine.height()},
                                  {"r", e.round},
                                  {"locked", valueToJson(e.value)},
                                  {"llr", e.llr},
                                  {"polcr", e.polcr ? Json(*e.polcr) : Json(nullptr)}});
                break;
            case Effect::Kind::StepEntry:
                sim.traceRec(self, TraceRecord::Kind::State,
                             Json{{"what", "step"},
                                  {"h", machine.height()},
                                  {"r", e.round},
                                  {"step", stepName(e.step)},
                                  {"phase", phaseName(machine.phase())}});
                break;
            case Effect::Kind::LockChange:
                sim.traceRec(self, TraceRecord::Kind::Lock,
                             Json{{"h", machine.height()},
                                  {"r", e.round},
                                  {"to", valueToJson(e.value)},
                                  {"llr", e.llr},
                                  {"reason", lockReasonName(e.lockReason)}});
                break;
            case Effect::Kind::TimeoutBump:
                sim.traceRec(self, TraceRecord::Kind::Timer,
                             Json{{"op", "bump"},
                                  {"kind", timerKindName(e.timer)},
                                  {"value", e.duration},
                                  {"h", machine.height()}});
                break;
            case Effect::Kind::Evidence:
                sim.traceRec(self, TraceRecord::Kind::Evidence,
                             Json{{"why", e.note}, {"msg", messageToJson(e.msg)}});
                break;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// OneShotNode

OneShotNode::OneShotNode(Simulator& sim, ProcessId self, std::vector<ProcessId> validators)
    : sim_(sim),
      self_(self),
      mempool_(sim.config().seed),
      machine_(
          self, 1, validators,
          OneShotParams{sim.config().timeoutPropose, sim.config().timeoutPrevote,
                        sim.config().unlockRule, sim.config().acceptAnyProposer},
          [this](Height h, Round r) { return makeBlockValue(h, r); },
          [this](const Value& v) {
              return isValid(v, ChainView{sim_.blocks().genesisDigest(), 0}, sim_.blocks());
          },
          &timerGen_, sim.config().proposerOffset) {}

Value OneShotNode::makeBlockValue(Height h, Round r) {
    Block b;
    b.height = h;
    b.parentHash = sim_.blocks().genesisDigest();
    b.payload = mempool_.draw(h, r, self_);
    Digest d = sim_.registerBlock(b);
    return Value::block(d);
}

void OneShotNode::start() {
    machine_.start();
    pump();
}

void OneShotNode::onDeliver(const ConsensusMessage& m) {
    if (m.kind == MsgKind::Commit) return;  // no repeated layer in this mode
    if (m.height != machine_.height()) return;
    machine_.onDeliver(m);
    pump();
}

void OneShotNode::onTimer(TimerKind kind, uint64_t generation) {
    if (kind == TimerKind::Commit) return;
    machine_.onTimer(kind, generation);
    pump();
}

void OneShotNode::pump() {
    applyMachineEffects(sim_, self_, machine_, maxRound_, [](const Value&) {});
}

// ---------------------------------------------------------------------------
// RepeatedNode

RepeatedNode::RepeatedNode(Simulator& sim, ProcessId self)
    : sim_(sim),
      self_(self),
      mempool_(sim.config().seed),
      timeoutCommit_(sim.config().timeoutCommit) {
    chain_.push_back(sim_.blocks().genesisDigest());
}

ChainView RepeatedNode::viewAt(Height prefixHeight) const {
    assert(prefixHeight < static_cast<Height>(chain_.size()));
    return ChainView{chain_[prefixHeight], prefixHeight};
}

Round RepeatedNode::maxRoundEntered() const { return maxRound_; }

void RepeatedNode::start() { enterHeight(1); }

void RepeatedNode::enterHeight(Height h) {
    height_ = h;
    pendingOutput_ = Value::bottom();
    commitArmed_ = false;
    validators_ = selectValidators(sim_.config(), viewAt(h - 1), h);
    isValidator_ = std::find(validators_.begin(), validators_.end(), self_) !=
                   validators_.end();
    const auto& reward = toReward_[h - 1];
    prevSignature_.assign(reward.begin(), reward.end());
    sim_.traceRec(self_, TraceRecord::Kind::State,
                  Json{{"what", "height_entry"},
                       {"h", h},
                       {"validators", validators_},
                       {"validator", isValidator_},
                       {"timeout_commit", timeoutCommit_}});
    machine_.reset();
    if (isValidator_) {
        const RunConfig& cfg = sim_.config();
        machine_.emplace(
            self_, h, validators_,
            OneShotParams{cfg.timeoutPropose, cfg.timeoutPrevote, cfg.unlockRule,
                          cfg.acceptAnyProposer},
            [this](Height hh, Round r) { return makeBlock(hh, r); },
            [this, h](const Value& v) { return isValid(v, viewAt(h - 1), sim_.blocks()); },
            &timerGen_, cfg.proposerOffset);
        machine_->start();
        pump();
    }
    drainPending();
    checkAdoption();
}

Value RepeatedNode::makeBlock(Height h, Round r) {
    Block b;
    b.height = h;
    b.parentHash = chain_[h - 1];
    b.payload = mempool_.draw(h, r, self_);
    b.lastCommit = prevSignature_;
    Digest d = sim_.registerBlock(b);
    RewardGrant grant = grantFor(b);
    if (grant.rewardHeight >= 1) sim_.registerGrant(d, grant);  // H-x <= 0: not yet
    return Value::block(d);
}

RewardGrant RepeatedNode::grantFor(const Block& b) {
    const RunConfig& cfg = sim_.config();
    RewardGrant g;
    switch (cfg.mechanism) {
        case MechanismVariant::Original:
        case MechanismVariant::Modulable:
            g.rewardHeight = b.height - 1;
            g.rewarded = b.lastCommit;
            break;
        case MechanismVariant::ModulableF1Filter: {
            g.rewardHeight = b.height - 1;
            auto it = commits_.find(b.height - 1);
            std::vector<ProcessId> attested =
                it == commits_.end() ? std::vector<ProcessId>{}
                                     : f1CommitFilter(it->second, cfg.f);
            for (ProcessId p : b.lastCommit)
                if (std::binary_search(attested.begin(), attested.end(), p))
                    g.rewarded.push_back(p);
            break;
        }
        case MechanismVariant::DelayedX: {
            Height target = b.height - cfg.delayX;
            if (target <= 0) {
                g.rewardHeight = 0;  // do not reward yet
                break;
            }
            g.rewardHeight = target;
            auto it = commits_.find(target);
            if (it != commits_.end())
                for (const auto& [signer, _] : it->second.retained())
                    g.rewarded.push_back(signer);
            break;
        }
    }
    if (g.rewardHeight <= 0) return RewardGrant{0, {}};
    return g;
}

void RepeatedNode::pump() {
    if (!machine_) return;
    applyMachineEffects(sim_, self_, *machine_, maxRound_,
                        [this](const Value& v) { onConsensusDecided(v); });
}

void RepeatedNode::onConsensusDecided(const Value& v) {
    // A one-shot instance returning a non-block would break Repeated Validity.
    assert(v.isBlock() && "one-shot consensus must decide a block");
    pendingOutput_ = v;
    std::vector<ProcessId> att = machine_->participantsSeen();
    sim_.broadcast(self_, makeCommit(self_, height_, v, std::move(att)), false);
    armCommitTimer();
}

void RepeatedNode::armCommitTimer() {
    commitGen_ = ++timerGen_;
    commitArmed_ = true;
    sim_.traceRec(self_, TraceRecord::Kind::Timer,
                  Json{{"op", "set"},
                       {"kind", "commit"},
                       {"gen", commitGen_},
                       {"duration", timeoutCommit_},
                       {"deadline", sim_.now() + timeoutCommit_},
                       {"h", height_}});
    sim_.scheduleTimer(self_, TimerKind::Commit, timeoutCommit_, commitGen_);
}

void RepeatedNode::onDeliver(const ConsensusMessage& m) {
    if (m.kind == MsgKind::Commit) {
        handleCommit(m);
        return;
    }
    if (m.height == height_ && machine_) {
        machine_->onDeliver(m);
        pump();
    } else if (m.height > height_) {
        pending_.push_back(m);
    }
    // One-shot messages for finished heights carry no new information here.
}

void RepeatedNode::handleCommit(const ConsensusMessage& m) {
    Height h = m.height;
    if (h > static_cast<Height>(chain_.size())) {
        // Validator set for h not computable yet.
        pending_.push_back(m);
        return;
    }
    std::vector<ProcessId> vset =
        h == height_ ? validators_ : selectValidators(sim_.config(), viewAt(h - 1), h);
    if (std::find(vset.begin(), vset.end(), m.signer) == vset.end()) {
        sim_.traceRec(self_, TraceRecord::Kind::Evidence,
                      Json{{"why", "commit_from_non_validator"},
                           {"msg", messageToJson(m)}});
        return;
    }
    InsertResult res = commits_[h].insert(m);
    if (res == InsertResult::Equivocation) {
        sim_.traceRec(self_, TraceRecord::Kind::Evidence,
                      Json{{"why", "commit_equivocation"}, {"msg", messageToJson(m)}});
        return;
    }
    if (res == InsertResult::Duplicate) return;
    if (toReward_[h].insert(m.signer).second) {
        sim_.traceRec(self_, TraceRecord::Kind::Reward,
                      Json{{"op", "to_reward"}, {"h", h}, {"p", m.signer}});
    }
    if (h == height_) checkAdoption();
}

void RepeatedNode::checkAdoption() {
    if (isValidator_ || !pendingOutput_.isBottom()) return;
    auto it = commits_.find(height_);
    if (it == commits_.end()) return;
    for (const Value& v : it->second.blockValues()) {
        if (!atLeastOneThird(v, it->second, sim_.config().n)) continue;
        if (!isValid(v, viewAt(height_ - 1), sim_.blocks())) continue;
        pendingOutput_ = v;
        sim_.traceRec(self_, TraceRecord::Kind::State,
                      Json{{"what", "adopted"}, {"h", height_}, {"v", valueToJson(v)}});
        armCommitTimer();
        return;
    }
}

void RepeatedNode::onTimer(TimerKind kind, uint64_t generation) {
    if (kind == TimerKind::Commit) {
        if (!commitArmed_ || generation != commitGen_) return;
        commitArmed_ = false;
        finishHeight();
        return;
    }
    if (machine_) {
        machine_->onTimer(kind, generation);
        pump();
    }
}

void RepeatedNode::finishHeight() {
    const RunConfig& cfg = sim_.config();
    int seen = static_cast<int>(toReward_[height_].size());
    if (cfg.mechanism == MechanismVariant::Modulable ||
        cfg.mechanism == MechanismVariant::ModulableF1Filter) {
        Tick next = modulableTimeoutUpdate(timeoutCommit_, seen, cfg.n);
        if (next != timeoutCommit_) {
            timeoutCommit_ = next;
            sim_.traceRec(self_, TraceRecord::Kind::Timer,
                          Json{{"op", "bump"},
                               {"kind", "commit"},
                               {"value", timeoutCommit_},
                               {"h", height_}});
        }
    }
    assert(pendingOutput_.isBlock());
    chain_.push_back(pendingOutput_.digest());
    sim_.outputDecided(self_, height_, pendingOutput_);
    enterHeight(height_ + 1);
}

void RepeatedNode::drainPending() {
    std::vector<ConsensusMessage> keep;
    std::vector<ConsensusMessage> ready;
    for (auto& m : pending_) {
        bool evaluable = m.kind == MsgKind::Commit
                             ? m.height <= static_cast<Height>(chain_.size())
                             : m.height == height_;
        bool stale = m.kind != MsgKind::Commit && m.height < height_;
        if (evaluable) ready.push_back(std::move(m));
        else if (!stale) keep.push_back(std::move(m));
    }
    pending_ = std::move(keep);
    for (auto& m : ready) {
        if (m.kind == MsgKind::Commit) handleCommit(m);
        else if (machine_) {
            machine_->onDeliver(m);
            pump();
        }
    }
}

}  // namespace tmbft
