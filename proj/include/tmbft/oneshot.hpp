#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "tmbft/block.hpp"
#include "tmbft/quorum.hpp"
#include "tmbft/votes.hpp"

namespace tmbft {

enum class TimerKind : uint8_t { Propose, Prevote, Commit };
const char* timerKindName(TimerKind k);

enum class Step : uint8_t { Propose, Prevote, Precommit, Decided };
const char* stepName(Step s);

// Sub-state of the per-round flow; each "wait until" of the protocol is one
// waiting phase that deliveries or timer firings move out of.
enum class Phase : uint8_t {
    ProposeWait,    // non-proposer, awaiting the round's proposal or timer
    UnlockWait,     // awaiting >2n/3 prevotes at the proposal's PoLC round
    PrevoteWait,    // voted; awaiting a decisive prevote quorum or timer
    PrecommitWait,  // voted; awaiting nil prevote quorum or >2n/3 precommits
    Decided,
};
const char* phaseName(Phase p);

enum class UnlockRule : uint8_t { Corrected, Legacy };

enum class LockReason : uint8_t { PrevoteQuorum, NilQuorum, ProposalUnlock };
const char* lockReasonName(LockReason r);

// Effects a validator emits while handling one event. The driving harness
// applies them in order; Broadcast implies zero-delay self delivery, which
// the machine performs itself by inserting its own message before emitting.
struct Effect {
    enum class Kind : uint8_t {
        Broadcast,
        SetTimer,
        CancelTimer,
        Decide,
        RoundEntry,   // entered `round` (snapshot llr/locked/polcr at entry)
        StepEntry,    // entered `step` for `round`
        LockChange,
        TimeoutBump,  // a timeout grew by one unit
        Evidence,
    };
    Kind kind;
    ConsensusMessage msg;       // Broadcast, Evidence
    TimerKind timer = TimerKind::Propose;
    Tick duration = 0;          // SetTimer
    uint64_t generation = 0;    // SetTimer / CancelTimer
    Value value;                // Decide, LockChange (new lock)
    Round round = 0;            // RoundEntry, StepEntry, LockChange
    Step step = Step::Propose;  // StepEntry
    LockReason lockReason = LockReason::PrevoteQuorum;
    Round llr = kNoRound;             // RoundEntry / LockChange snapshot
    std::optional<Round> polcr;       // RoundEntry snapshot
    std::string note;           // Evidence reason, TimeoutBump name
};

struct OneShotParams {
    Tick timeoutPropose = 10;
    Tick timeoutPrevote = 10;
    UnlockRule unlockRule = UnlockRule::Corrected;
    bool acceptAnyProposer = false;  // legacy: skip the proposer identity check
};

// Round-robin proposer selection. Within one height consecutive rounds cycle
// through the whole validator list; the first proposer shifts with height.
ProcessId proposerAt(const std::vector<ProcessId>& validators, Height h, Round r,
                     int offset = 0);

// The per-validator state machine for one height: a deterministic event
// handler. Feed deliveries and timer firings; read effects. Message dedup by
// content and relaying live in the network layer, not here; this machine
// sees each distinct message once.
class OneShotMachine {
public:
    // makeBlock is invoked when this validator proposes while unlocked.
    using MakeBlockFn = std::function<Value(Height, Round)>;
    // Validity of a proposal against the owner's chain context.
    using ValidFn = std::function<bool(const Value&)>;

    OneShotMachine(ProcessId self, Height height, std::vector<ProcessId> validators,
                   OneShotParams params, MakeBlockFn makeBlock, ValidFn valid,
                   uint64_t* timerGenCounter, int proposerOffset = 0);

    void start();
    void onDeliver(const ConsensusMessage& m);
    void onTimer(TimerKind kind, uint64_t generation);

    std::vector<Effect> takeEffects() { return std::move(effects_); }

    // Introspection for traces, tests and the repeated driver.
    ProcessId self() const { return self_; }
    Height height() const { return height_; }
    Round round() const { return round_; }
    Step step() const { return step_; }
    Phase phase() const { return phase_; }
    const Value& lockedBlock() const { return lockedBlock_; }
    Round llr() const { return llr_; }
    std::optional<Round> polcr() const { return polcr_; }
    Tick timeoutPropose() const { return timeoutPropose_; }
    Tick timeoutPrevote() const { return timeoutPrevote_; }
    const Value& decided() const { return decided_; }
    bool isDecided() const { return phase_ == Phase::Decided; }
    int n() const { return static_cast<int>(validators_.size()); }
    bool isValidator(ProcessId p) const;
    // Validators whose messages this machine has retained (for attestations).
    std::vector<ProcessId> participantsSeen() const;

private:
    void advanceRound(Round target);
    void enterPropose();
    void enterPrevote();
    void checkUnlockWait();
    void castPrevote();
    bool decisivePrevoteQuorum() const;
    void enterPrecommit();
    void checkPrecommitExit();
    bool tryDecide(Round r);
    void handlePropose(const ConsensusMessage& m);
    void handlePrevote(const ConsensusMessage& m);
    void handlePrecommit(const ConsensusMessage& m);
    void broadcastOwn(ConsensusMessage m);
    void storeProposal(const ConsensusMessage& m);
    InsertResult insertVote(const ConsensusMessage& m);
    void setLock(const Value& v, LockReason reason);
    void armTimer(TimerKind kind, Tick duration);
    void cancelTimer(TimerKind kind);
    void evidence(const ConsensusMessage& m, const std::string& why);
    void noteRoundEntry();
    void noteStepEntry();
    std::optional<Value> prevoteQuorumValue(Round r) const;

    ProcessId self_;
    Height height_;
    std::vector<ProcessId> validators_;
    OneShotParams params_;
    MakeBlockFn makeBlock_;
    ValidFn valid_;
    int proposerOffset_;

    Round round_ = 0;
    Step step_ = Step::Propose;
    Phase phase_ = Phase::ProposeWait;
    Value lockedBlock_ = Value::nil();
    Round llr_ = kNoRound;
    std::optional<Round> polcr_;
    Tick timeoutPropose_;
    Tick timeoutPrevote_;
    Value decided_ = Value::bottom();
    Round unlockWaitRound_ = 0;

    std::map<Round, ConsensusMessage> proposals_;
    std::map<Round, VoteSet> prevotes_;
    std::map<Round, VoteSet> precommits_;

    uint64_t* timerGen_;
    uint64_t proposeGen_ = 0;
    uint64_t prevoteGen_ = 0;
    bool proposePending_ = false;
    bool prevotePending_ = false;

    std::vector<Effect> effects_;
};

}  // namespace tmbft
