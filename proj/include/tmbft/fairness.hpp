#pragma once

#include <map>
#include <set>
#include <vector>

#include "tmbft/config.hpp"
#include "tmbft/votes.hpp"

namespace tmbft {

// One block's reward proposal: which height it rewards and who gets paid.
// Registered when the block is created; it takes effect only if that block
// is the one decided.
struct RewardGrant {
    Height rewardHeight = 0;
    std::vector<ProcessId> rewarded;  // sorted
};

// Run-level record of distributed rewards, fed by block creation and chain
// extension. The auditor reads this, never block payloads.
class RewardLedger {
public:
    void registerGrant(Digest block, RewardGrant grant);
    // Called when a block becomes part of the decided chain.
    void activate(Digest block);
    bool isRewarded(Height h, ProcessId p) const;
    bool heightRewardKnown(Height h) const { return rewarded_.count(h) != 0; }
    const std::map<Height, std::vector<ProcessId>>& rewarded() const { return rewarded_; }

private:
    std::map<Digest, RewardGrant> grants_;
    std::map<Height, std::vector<ProcessId>> rewarded_;
};

// Reward parameter ground truth: 1 exactly for the correct validators of the
// height, 0 for faulty validators and for processes outside the set.
std::map<ProcessId, int> groundTruthRewardParams(const RunConfig& cfg,
                                                 const std::vector<ProcessId>& validatorSet);

// Modulable-timeout rule: grow the commit timeout by one unit whenever fewer
// than n commits arrived before it expired.
Tick modulableTimeoutUpdate(Tick timeoutCommit, int commitsSeen, int n);

// f+1 commit filter: keep only processes attested by at least f+1 distinct
// committers (each commit's attestation lists who that committer heard from).
std::vector<ProcessId> f1CommitFilter(const VoteSet& commits, int f);

enum class FairnessVerdict : uint8_t { Fair, EventuallyFair, NotEventuallyFair, NoData };
const char* fairnessVerdictName(FairnessVerdict v);

struct AuditReport {
    FairnessVerdict verdict = FairnessVerdict::NoData;
    Height auditedFrom = 0;
    Height auditedTo = 0;                      // inclusive; 0 = nothing audited
    Height hStar = 0;                          // EventuallyFair: first clean height
    Height firstViolation = 0;
    Height lastViolation = 0;
    std::map<Height, std::vector<ProcessId>> violations;
    Json toJson() const;
};

// Checks condition 4 per audited height (rewarded iff reward parameter 1)
// and the bounded form of condition 4bis over the trace horizon.
AuditReport auditFairness(const RunConfig& cfg, const RewardLedger& ledger,
                          const std::map<Height, std::vector<ProcessId>>& validatorSets,
                          Height lastOutput, int tailWindow);

}  // namespace tmbft
