#include "tmbft/fairness.hpp"

#include <algorithm>

namespace tmbft {

void RewardLedger::registerGrant(Digest block, RewardGrant grant) {
    std::sort(grant.rewarded.begin(), grant.rewarded.end());
    grants_.emplace(block, std::move(grant));
}

void RewardLedger::activate(Digest block) {
    auto it = grants_.find(block);
    if (it == grants_.end()) return;  // block grants nothing (genesis or H<=x)
    rewarded_.emplace(it->second.rewardHeight, it->second.rewarded);
}

bool RewardLedger::isRewarded(Height h, ProcessId p) const {
    auto it = rewarded_.find(h);
    if (it == rewarded_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), p);
}

std::map<ProcessId, int> groundTruthRewardParams(
    const RunConfig& cfg, const std::vector<ProcessId>& validatorSet) {
    std::map<ProcessId, int> out;
    for (ProcessId p = 0; p < cfg.rosterSize; ++p) out[p] = 0;
    for (ProcessId v : validatorSet)
        if (!cfg.isByzantine(v)) out[v] = 1;
    return out;
}

Tick modulableTimeoutUpdate(Tick timeoutCommit, int commitsSeen, int n) {
    return commitsSeen < n ? timeoutCommit + 1 : timeoutCommit;
}

std::vector<ProcessId> f1CommitFilter(const VoteSet& commits, int f) {
    std::map<ProcessId, int> attestCount;
    for (const auto& [committer, msg] : commits.retained()) {
        (void)committer;
        for (ProcessId p : msg.attestation) attestCount[p] += 1;
    }
    std::vector<ProcessId> out;
    for (const auto& [p, c] : attestCount)
        if (c >= f + 1) out.push_back(p);
    return out;
}

const char* fairnessVerdictName(FairnessVerdict v) {
    switch (v) {
        case FairnessVerdict::Fair: return "FAIR";
        case FairnessVerdict::EventuallyFair: return "EVENTUALLY-FAIR";
        case FairnessVerdict::NotEventuallyFair: return "NOT-EVENTUALLY-FAIR";
        case FairnessVerdict::NoData: return "NO-DATA";
    }
    return "?";
}

Json AuditReport::toJson() const {
    Json j;
    j["verdict"] = fairnessVerdictName(verdict);
    j["audited_from"] = auditedFrom;
    j["audited_to"] = auditedTo;
    j["h_star"] = hStar;
    j["first_violation"] = firstViolation;
    j["last_violation"] = lastViolation;
    Json v = Json::object();
    for (const auto& [h, ps] : violations) v[std::to_string(h)] = ps;
    j["violations"] = v;
    return j;
}

AuditReport auditFairness(const RunConfig& cfg, const RewardLedger& ledger,
                          const std::map<Height, std::vector<ProcessId>>& validatorSets,
                          Height lastOutput, int tailWindow) {
    AuditReport rep;
    // Rewards for height h are assigned by a later decided block; audit only
    // heights whose reward decision exists.
    Height from = 0, to = 0;
    for (const auto& [h, _] : ledger.rewarded()) {
        if (from == 0) from = h;
        to = std::max(to, h);
    }
    if (from == 0) {
        rep.verdict = FairnessVerdict::NoData;
        return rep;
    }
    rep.auditedFrom = from;
    rep.auditedTo = to;
    (void)lastOutput;

    for (Height h = from; h <= to; ++h) {
        auto vsIt = validatorSets.find(h);
        if (vsIt == validatorSets.end()) continue;
        auto params = groundTruthRewardParams(cfg, vsIt->second);
        std::vector<ProcessId> bad;
        for (const auto& [p, param] : params) {
            bool rewarded = ledger.heightRewardKnown(h) && ledger.isRewarded(h, p);
            if (rewarded != (param == 1)) bad.push_back(p);
        }
        if (!bad.empty()) {
            if (rep.firstViolation == 0) rep.firstViolation = h;
            rep.lastViolation = h;
            rep.violations[h] = std::move(bad);
        }
    }

    if (rep.violations.empty()) {
        rep.verdict = FairnessVerdict::Fair;
        rep.hStar = from;
        return rep;
    }
    Height hStar = rep.lastViolation + 1;
    if (hStar <= to - tailWindow) {
        rep.verdict = FairnessVerdict::EventuallyFair;
        rep.hStar = hStar;
    } else {
        rep.verdict = FairnessVerdict::NotEventuallyFair;
    }
    return rep;
}

}  // namespace tmbft
