#include "tmbft/oneshot.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace tmbft {

const char* timerKindName(TimerKind k) {
    switch (k) {
        case TimerKind::Propose: return "propose";
        case TimerKind::Prevote: return "prevote";
        case TimerKind::Commit: return "commit";
    }
    return "?";
}

const char* stepName(Step s) {
    switch (s) {
        case Step::Propose: return "PROPOSE";
        case Step::Prevote: return "PREVOTE";
        case Step::Precommit: return "PRECOMMIT";
        case Step::Decided: return "DECIDED";
    }
    return "?";
}

const char* phaseName(Phase p) {
    switch (p) {
        case Phase::ProposeWait: return "propose_wait";
        case Phase::UnlockWait: return "unlock_wait";
        case Phase::PrevoteWait: return "prevote_wait";
        case Phase::PrecommitWait: return "precommit_wait";
        case Phase::Decided: return "decided";
    }
    return "?";
}

const char* lockReasonName(LockReason r) {
    switch (r) {
        case LockReason::PrevoteQuorum: return "prevote_quorum";
        case LockReason::NilQuorum: return "nil_quorum";
        case LockReason::ProposalUnlock: return "proposal_unlock";
    }
    return "?";
}

ProcessId proposerAt(const std::vector<ProcessId>& validators, Height h, Round r,
                     int offset) {
    assert(!validators.empty() && r >= 1);
    size_t n = validators.size();
    size_t idx = (static_cast<size_t>(h - 1) + static_cast<size_t>(r - 1) +
                  static_cast<size_t>(offset)) % n;
    return validators[idx];
}

OneShotMachine::OneShotMachine(ProcessId self, Height height,
                               std::vector<ProcessId> validators, OneShotParams params,
                               MakeBlockFn makeBlock, ValidFn valid,
                               uint64_t* timerGenCounter, int proposerOffset)
    : self_(self),
      height_(height),
      validators_(std::move(validators)),
      params_(params),
      makeBlock_(std::move(makeBlock)),
      valid_(std::move(valid)),
      proposerOffset_(proposerOffset),
      timeoutPropose_(params.timeoutPropose),
      timeoutPrevote_(params.timeoutPrevote),
      timerGen_(timerGenCounter) {}

bool OneShotMachine::isValidator(ProcessId p) const {
    return std::find(validators_.begin(), validators_.end(), p) != validators_.end();
}

std::vector<ProcessId> OneShotMachine::participantsSeen() const {
    std::set<ProcessId> seen;
    seen.insert(self_);
    for (const auto& [_, m] : proposals_) seen.insert(m.signer);
    for (const auto& [_, vs] : prevotes_)
        for (const auto& [signer, __] : vs.retained()) seen.insert(signer);
    for (const auto& [_, vs] : precommits_)
        for (const auto& [signer, __] : vs.retained()) seen.insert(signer);
    return {seen.begin(), seen.end()};
}

void OneShotMachine::start() { advanceRound(1); }

void OneShotMachine::noteRoundEntry() {
    Effect e;
    e.kind = Effect::Kind::RoundEntry;
    e.round = round_;
    e.value = lockedBlock_;
    e.llr = llr_;
    e.polcr = polcr_;
    effects_.push_back(std::move(e));
}

void OneShotMachine::noteStepEntry() {
    Effect e;
    e.kind = Effect::Kind::StepEntry;
    e.step = step_;
    e.round = round_;
    effects_.push_back(std::move(e));
}

void OneShotMachine::advanceRound(Round target) {
    cancelTimer(TimerKind::Propose);
    cancelTimer(TimerKind::Prevote);
    round_ = target;
    noteRoundEntry();
    enterPropose();
}

void OneShotMachine::enterPropose() {
    step_ = Step::Propose;
    noteStepEntry();
    if (proposerAt(validators_, height_, round_, proposerOffset_) == self_) {
        // A proposer still bound by a lock re-proposes it with the round it
        // locked at; otherwise it creates a fresh block. The lock itself is
        // the test: a proposal-unlock clears lockedBlock but leaves llr.
        Value b;
        if (!lockedBlock_.isNil()) {
            polcr_ = llr_;
            b = lockedBlock_;
        } else {
            b = makeBlock_(height_, round_);
        }
        broadcastOwn(makePropose(self_, height_, round_, b, polcr_));
        enterPrevote();
        return;
    }
    if (proposals_.count(round_)) {
        enterPrevote();
        return;
    }
    phase_ = Phase::ProposeWait;
    armTimer(TimerKind::Propose, timeoutPropose_);
}

void OneShotMachine::enterPrevote() {
    cancelTimer(TimerKind::Propose);
    step_ = Step::Prevote;
    noteStepEntry();
    if (polcr_ && llr_ != kNoRound && llr_ < *polcr_ && *polcr_ < round_) {
        phase_ = Phase::UnlockWait;
        unlockWaitRound_ = *polcr_;
        checkUnlockWait();
        return;
    }
    castPrevote();
}

std::optional<Value> OneShotMachine::prevoteQuorumValue(Round r) const {
    auto it = prevotes_.find(r);
    if (it == prevotes_.end()) return std::nullopt;
    for (const Value& v : it->second.blockValues())
        if (is23Maj(v, it->second, n())) return v;
    return std::nullopt;
}

void OneShotMachine::checkUnlockWait() {
    auto it = prevotes_.find(unlockWaitRound_);
    if (it == prevotes_.end() ||
        it->second.distinctSigners() < static_cast<size_t>(quorum(n())))
        return;  // keep waiting
    if (auto b = prevoteQuorumValue(unlockWaitRound_)) {
        bool unlock = params_.unlockRule == UnlockRule::Legacy || *b != lockedBlock_;
        if (unlock && !lockedBlock_.isNil()) setLock(Value::nil(), LockReason::ProposalUnlock);
    }
    castPrevote();
}

void OneShotMachine::castPrevote() {
    Value v = Value::nil();
    if (!lockedBlock_.isNil()) {
        v = lockedBlock_;
    } else {
        auto it = proposals_.find(round_);
        if (it != proposals_.end() && valid_(it->second.value)) v = it->second.value;
    }
    broadcastOwn(makePrevote(self_, height_, round_, v, llr_));
    phase_ = Phase::PrevoteWait;
    if (decisivePrevoteQuorum()) {
        enterPrecommit();
        return;
    }
    armTimer(TimerKind::Prevote, timeoutPrevote_);
}

bool OneShotMachine::decisivePrevoteQuorum() const {
    auto it = prevotes_.find(round_);
    if (it == prevotes_.end()) return false;
    if (is23Maj(Value::nil(), it->second, n())) return true;
    return prevoteQuorumValue(round_).has_value();
}

void OneShotMachine::enterPrecommit() {
    cancelTimer(TimerKind::Prevote);
    step_ = Step::Precommit;
    noteStepEntry();
    auto& pv = prevotes_[round_];
    if (auto b = prevoteQuorumValue(round_)) {
        setLock(*b, LockReason::PrevoteQuorum);
        broadcastOwn(makePrecommit(self_, height_, round_, *b));
        llr_ = round_;
    } else if (is23Maj(Value::nil(), pv, n())) {
        setLock(Value::nil(), LockReason::NilQuorum);
        llr_ = kNoRound;
        broadcastOwn(makePrecommit(self_, height_, round_, Value::nil()));
    } else {
        broadcastOwn(makePrecommit(self_, height_, round_, Value::nil()));
    }
    if (tryDecide(round_)) return;
    phase_ = Phase::PrecommitWait;
    checkPrecommitExit();
}

void OneShotMachine::checkPrecommitExit() {
    auto pv = prevotes_.find(round_);
    bool nilPrevotes =
        pv != prevotes_.end() && is23Maj(Value::nil(), pv->second, n());
    auto pc = precommits_.find(round_);
    bool anyPrecommits = pc != precommits_.end() && anyTwoThirds(pc->second, n());
    if (nilPrevotes || anyPrecommits) advanceRound(round_ + 1);
}

bool OneShotMachine::tryDecide(Round r) {
    auto it = precommits_.find(r);
    if (it == precommits_.end()) return false;
    for (const Value& v : it->second.blockValues()) {
        if (!is23Maj(v, it->second, n())) continue;
        decided_ = v;
        step_ = Step::Decided;
        phase_ = Phase::Decided;
        cancelTimer(TimerKind::Propose);
        cancelTimer(TimerKind::Prevote);
        Effect e;
        e.kind = Effect::Kind::Decide;
        e.value = v;
        e.round = r;
        effects_.push_back(std::move(e));
        return true;
    }
    return false;
}

void OneShotMachine::onDeliver(const ConsensusMessage& m) {
    assert(m.height == height_);
    if (phase_ == Phase::Decided) return;
    switch (m.kind) {
        case MsgKind::Propose: handlePropose(m); break;
        case MsgKind::Prevote: handlePrevote(m); break;
        case MsgKind::Precommit: handlePrecommit(m); break;
        case MsgKind::Commit: break;  // handled by the repeated driver
    }
}

void OneShotMachine::handlePropose(const ConsensusMessage& m) {
    if (!isValidator(m.signer)) {
        evidence(m, "propose_from_non_validator");
        return;
    }
    if (!params_.acceptAnyProposer &&
        m.signer != proposerAt(validators_, height_, m.round, proposerOffset_)) {
        evidence(m, "propose_from_wrong_proposer");
        return;
    }
    auto it = proposals_.find(m.round);
    if (it != proposals_.end()) {
        if (!(it->second == m)) evidence(m, "propose_equivocation");
        return;
    }
    storeProposal(m);
    if (phase_ == Phase::ProposeWait && m.round == round_) {
        enterPrevote();
    }
}

void OneShotMachine::storeProposal(const ConsensusMessage& m) {
    proposals_.emplace(m.round, m);
    polcr_ = m.polcRound;
}

InsertResult OneShotMachine::insertVote(const ConsensusMessage& m) {
    auto& set = m.kind == MsgKind::Prevote ? prevotes_[m.round] : precommits_[m.round];
    InsertResult res = set.insert(m);
    if (res == InsertResult::Equivocation) evidence(m, "vote_equivocation");
    return res;
}

void OneShotMachine::handlePrevote(const ConsensusMessage& m) {
    if (!isValidator(m.signer)) {
        evidence(m, "prevote_from_non_validator");
        return;
    }
    if (insertVote(m) != InsertResult::New) return;
    if (m.round > round_ && anyTwoThirds(prevotes_[m.round], n())) {
        cancelTimer(TimerKind::Propose);
        cancelTimer(TimerKind::Prevote);
        round_ = m.round;
        noteRoundEntry();
        enterPrevote();
        return;
    }
    if (phase_ == Phase::UnlockWait && m.round == unlockWaitRound_) {
        checkUnlockWait();
        return;
    }
    if (phase_ == Phase::PrevoteWait && m.round == round_ && decisivePrevoteQuorum()) {
        enterPrecommit();
        return;
    }
    if (phase_ == Phase::PrecommitWait && m.round == round_) {
        checkPrecommitExit();
    }
}

void OneShotMachine::handlePrecommit(const ConsensusMessage& m) {
    if (!isValidator(m.signer)) {
        evidence(m, "precommit_from_non_validator");
        return;
    }
    if (insertVote(m) != InsertResult::New) return;
    if (tryDecide(m.round)) return;
    if (m.round > round_ && anyTwoThirds(precommits_[m.round], n())) {
        cancelTimer(TimerKind::Propose);
        cancelTimer(TimerKind::Prevote);
        round_ = m.round;
        noteRoundEntry();
        enterPrecommit();
        return;
    }
    if (phase_ == Phase::PrecommitWait && m.round == round_) {
        checkPrecommitExit();
    }
}

void OneShotMachine::onTimer(TimerKind kind, uint64_t generation) {
    if (phase_ == Phase::Decided) return;
    if (kind == TimerKind::Propose) {
        if (generation != proposeGen_ || phase_ != Phase::ProposeWait) return;
        proposePending_ = false;
        if (!proposals_.count(round_)) {
            timeoutPropose_ += 1;
            Effect e;
            e.kind = Effect::Kind::TimeoutBump;
            e.timer = TimerKind::Propose;
            e.duration = timeoutPropose_;
            effects_.push_back(std::move(e));
        }
        enterPrevote();
        return;
    }
    if (kind == TimerKind::Prevote) {
        if (generation != prevoteGen_ || phase_ != Phase::PrevoteWait) return;
        prevotePending_ = false;
        timeoutPrevote_ += 1;
        Effect e;
        e.kind = Effect::Kind::TimeoutBump;
        e.timer = TimerKind::Prevote;
        e.duration = timeoutPrevote_;
        effects_.push_back(std::move(e));
        enterPrecommit();
        return;
    }
}

void OneShotMachine::broadcastOwn(ConsensusMessage m) {
    // Zero-delay self delivery: own messages enter this validator's stores at
    // emission so the step logic that follows sees them.
    switch (m.kind) {
        case MsgKind::Propose:
            if (!proposals_.count(m.round)) storeProposal(m);
            break;
        case MsgKind::Prevote:
            prevotes_[m.round].insert(m);
            break;
        case MsgKind::Precommit:
            precommits_[m.round].insert(m);
            break;
        case MsgKind::Commit: break;
    }
    Effect e;
    e.kind = Effect::Kind::Broadcast;
    e.msg = std::move(m);
    effects_.push_back(std::move(e));
}

void OneShotMachine::setLock(const Value& v, LockReason reason) {
    bool changed = !(v == lockedBlock_);
    lockedBlock_ = v;
    if (!changed && reason != LockReason::PrevoteQuorum) return;
    Effect e;
    e.kind = Effect::Kind::LockChange;
    e.value = v;
    e.round = round_;
    e.lockReason = reason;
    e.llr = llr_;
    effects_.push_back(std::move(e));
}

void OneShotMachine::armTimer(TimerKind kind, Tick duration) {
    uint64_t gen = ++(*timerGen_);
    if (kind == TimerKind::Propose) {
        proposeGen_ = gen;
        proposePending_ = true;
    }
    if (kind == TimerKind::Prevote) {
        prevoteGen_ = gen;
        prevotePending_ = true;
    }
    Effect e;
    e.kind = Effect::Kind::SetTimer;
    e.timer = kind;
    e.duration = duration;
    e.generation = gen;
    effects_.push_back(std::move(e));
}

void OneShotMachine::cancelTimer(TimerKind kind) {
    bool& pending = kind == TimerKind::Propose ? proposePending_ : prevotePending_;
    uint64_t gen = ++(*timerGen_);
    if (kind == TimerKind::Propose) proposeGen_ = gen;
    if (kind == TimerKind::Prevote) prevoteGen_ = gen;
    if (!pending) return;
    pending = false;
    Effect e;
    e.kind = Effect::Kind::CancelTimer;
    e.timer = kind;
    e.generation = gen;
    effects_.push_back(std::move(e));
}

void OneShotMachine::evidence(const ConsensusMessage& m, const std::string& why) {
    Effect e;
    e.kind = Effect::Kind::Evidence;
    e.msg = m;
    e.note = why;
    effects_.push_back(std::move(e));
}

}  // namespace tmbft
