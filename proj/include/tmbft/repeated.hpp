#pragma once

#include <optional>

#include "tmbft/netsim.hpp"

namespace tmbft {

// Deterministic validator selection for a height, given the chain prefix.
// Static: the first n roster processes at every height. Rotating: a
// stake-weighted deterministic draw keyed by the chain tip hash, so the set
// shifts as the chain grows while staying identical across correct processes
// with equal prefixes.
std::vector<ProcessId> selectValidators(const RunConfig& cfg, const ChainView& prefixTip,
                                        Height h);

// A validator running a single one-shot consensus instance at height 1 on
// top of genesis. Used by the one-shot run mode and scripted scenarios.
class OneShotNode : public Node {
public:
    OneShotNode(Simulator& sim, ProcessId self, std::vector<ProcessId> validators);

    void start() override;
    void onDeliver(const ConsensusMessage& m) override;
    void onTimer(TimerKind kind, uint64_t generation) override;
    Round maxRoundEntered() const override { return maxRound_; }
    bool hasDecided() const override { return machine_.isDecided(); }

    const OneShotMachine& machine() const { return machine_; }

private:
    void pump();
    Value makeBlockValue(Height h, Round r);

    Simulator& sim_;
    ProcessId self_;
    MempoolStub mempool_;
    uint64_t timerGen_ = 0;
    Round maxRound_ = 0;
    OneShotMachine machine_;
};

// The repeated-consensus driver for one correct process: per-height validator
// selection, the one-shot instance when selected, commit collection and
// relaying, the commit timeout, chain extension and reward bookkeeping.
class RepeatedNode : public Node {
public:
    RepeatedNode(Simulator& sim, ProcessId self);

    void start() override;
    void onDeliver(const ConsensusMessage& m) override;
    void onTimer(TimerKind kind, uint64_t generation) override;
    Round maxRoundEntered() const override;
    Height outputsProduced() const override {
        return static_cast<Height>(chain_.size()) - 1;
    }
    bool hasDecided() const override { return outputsProduced() > 0; }

    Height currentHeight() const { return height_; }
    const std::vector<Digest>& chain() const { return chain_; }
    Tick timeoutCommit() const { return timeoutCommit_; }
    const std::vector<ProcessId>& validators() const { return validators_; }

private:
    void enterHeight(Height h);
    void pump();
    void handleCommit(const ConsensusMessage& m);
    void checkAdoption();
    void onConsensusDecided(const Value& v);
    void armCommitTimer();
    void finishHeight();
    void drainPending();
    ChainView viewAt(Height prefixHeight) const;
    Value makeBlock(Height h, Round r);
    RewardGrant grantFor(const Block& b);

    Simulator& sim_;
    ProcessId self_;
    MempoolStub mempool_;
    uint64_t timerGen_ = 0;

    Height height_ = 0;
    std::vector<Digest> chain_;  // chain_[h] = digest of block at height h
    std::vector<ProcessId> validators_;
    bool isValidator_ = false;
    std::optional<OneShotMachine> machine_;
    Round maxRound_ = 0;

    std::map<Height, VoteSet> commits_;
    std::map<Height, std::set<ProcessId>> toReward_;
    std::vector<ProcessId> prevSignature_;  // toReward[H-1] snapshot at height entry
    Tick timeoutCommit_;
    uint64_t commitGen_ = 0;
    bool commitArmed_ = false;
    Value pendingOutput_ = Value::bottom();
    std::vector<ConsensusMessage> pending_;  // not yet evaluable (future heights)
};

}  // namespace tmbft
