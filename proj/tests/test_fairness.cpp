#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tmbft/fairness.hpp"
#include "tmbft/runner.hpp"
#include "tmbft/scenarios.hpp"

using namespace tmbft;

namespace {

RunConfig plainCfg(int roster) {
    RunConfig c;
    c.mode = RunMode::Repeated;
    c.rosterSize = roster;
    c.n = roster;
    c.f = 1;
    return c;
}

}  // namespace

TEST_CASE("ground-truth reward parameters") {
    RunConfig c = plainCfg(6);
    c.n = 4;
    c.byzantine = {3};
    auto params = groundTruthRewardParams(c, {0, 1, 2, 3});
    CHECK(params[0] == 1);
    CHECK(params[1] == 1);
    CHECK(params[2] == 1);
    CHECK(params[3] == 0);  // faulty validator
    CHECK(params[4] == 0);  // not a validator
    CHECK(params[5] == 0);
}

TEST_CASE("modulable timeout rule") {
    CHECK(modulableTimeoutUpdate(5, 3, 4) == 6);
    CHECK(modulableTimeoutUpdate(5, 4, 4) == 5);
    Tick t = 5;
    for (int i = 0; i < 7; ++i) t = modulableTimeoutUpdate(t, 2, 4);
    CHECK(t == 12);  // +1 per shortfall height
}

TEST_CASE("f+1 commit filter") {
    Value b = Value::block(0xabc);
    VoteSet commits;
    commits.insert(makeCommit(0, 3, b, {0, 1, 2, 3}));
    commits.insert(makeCommit(1, 3, b, {0, 1}));
    commits.insert(makeCommit(3, 3, b, {3, 5}));
    SUBCASE("attested by two committers passes f=1") {
        auto kept = f1CommitFilter(commits, 1);
        // p0: attested by committers 0 and 1. p1: by 0 and 1. p2: only by 0.
        // p3: by 0 and 3. p5: only by 3.
        CHECK(std::count(kept.begin(), kept.end(), 0) == 1);
        CHECK(std::count(kept.begin(), kept.end(), 1) == 1);
        CHECK(std::count(kept.begin(), kept.end(), 2) == 0);
        CHECK(std::count(kept.begin(), kept.end(), 3) == 1);
        CHECK(std::count(kept.begin(), kept.end(), 5) == 0);
    }
    SUBCASE("empty attestations yield an empty set") {
        VoteSet none;
        none.insert(makeCommit(0, 3, b, {}));
        CHECK(f1CommitFilter(none, 1).empty());
    }
}

TEST_CASE("audit verdicts over synthetic ledgers") {
    RunConfig c = plainCfg(4);
    std::map<Height, std::vector<ProcessId>> vsets;
    for (Height h = 1; h <= 40; ++h) vsets[h] = {0, 1, 2, 3};

    SUBCASE("rewards matching ground truth audit FAIR") {
        RewardLedger led;
        for (Height h = 1; h <= 40; ++h) {
            led.registerGrant(h, RewardGrant{h, {0, 1, 2, 3}});
            led.activate(h);
        }
        AuditReport rep = auditFairness(c, led, vsets, 40, 10);
        CHECK(rep.verdict == FairnessVerdict::Fair);
        CHECK(rep.auditedFrom == 1);
        CHECK(rep.auditedTo == 40);
    }
    SUBCASE("early violations with a clean tail audit EVENTUALLY-FAIR") {
        RewardLedger led;
        for (Height h = 1; h <= 40; ++h) {
            std::vector<ProcessId> set =
                h < 12 ? std::vector<ProcessId>{0, 1, 2} : std::vector<ProcessId>{0, 1, 2, 3};
            led.registerGrant(h, RewardGrant{h, set});
            led.activate(h);
        }
        AuditReport rep = auditFairness(c, led, vsets, 40, 10);
        CHECK(rep.verdict == FairnessVerdict::EventuallyFair);
        CHECK(rep.hStar == 12);
        CHECK(rep.firstViolation == 1);
        CHECK(rep.lastViolation == 11);
    }
    SUBCASE("violations into the tail audit NOT-EVENTUALLY-FAIR") {
        RewardLedger led;
        for (Height h = 1; h <= 40; ++h) {
            std::vector<ProcessId> set = h % 2 ? std::vector<ProcessId>{0, 1, 2}
                                               : std::vector<ProcessId>{0, 1, 2, 3};
            led.registerGrant(h, RewardGrant{h, set});
            led.activate(h);
        }
        AuditReport rep = auditFairness(c, led, vsets, 40, 10);
        CHECK(rep.verdict == FairnessVerdict::NotEventuallyFair);
    }
    SUBCASE("rewarding a faulty validator violates condition 4 too") {
        RunConfig cb = plainCfg(4);
        cb.byzantine = {3};
        RewardLedger led;
        for (Height h = 1; h <= 40; ++h) {
            led.registerGrant(h, RewardGrant{h, {0, 1, 2, 3}});  // pays the faulty one
            led.activate(h);
        }
        AuditReport rep = auditFairness(cb, led, vsets, 40, 10);
        CHECK(rep.verdict == FairnessVerdict::NotEventuallyFair);
    }
    SUBCASE("no grants, no data") {
        RewardLedger led;
        AuditReport rep = auditFairness(c, led, vsets, 0, 10);
        CHECK(rep.verdict == FairnessVerdict::NoData);
    }
}

TEST_CASE("a grant activates only when its block is decided") {
    RewardLedger led;
    led.registerGrant(0xaaa, RewardGrant{3, {0, 1}});
    led.registerGrant(0xbbb, RewardGrant{3, {2}});
    CHECK_FALSE(led.heightRewardKnown(3));
    led.activate(0xaaa);
    CHECK(led.isRewarded(3, 0));
    CHECK(led.isRewarded(3, 1));
    CHECK_FALSE(led.isRewarded(3, 2));  // the losing proposal never pays
    led.activate(0xbbb);                // later activations do not overwrite
    CHECK(led.isRewarded(3, 0));
}

TEST_CASE("delayed-reward with x beyond the horizon never pays") {
    const Scenario* sc = findBuiltinScenario("delayed-reward-sync");
    REQUIRE(sc != nullptr);
    RunConfig c = sc->config;
    c.horizonHeights = 6;
    c.delayX = 10;
    RunResult res = runOne(c);
    CHECK(res.facts.ledger.rewarded().empty());
}

TEST_CASE("delayed-reward mechanism skips heights at or below x") {
    const Scenario* sc = findBuiltinScenario("delayed-reward-sync");
    REQUIRE(sc != nullptr);
    RunConfig c = sc->config;
    c.horizonHeights = 8;
    c.delayX = 3;
    RunResult res = runOne(c);
    // With x=3 the first rewardable height is 1, granted by block 4.
    CHECK(res.facts.ledger.rewarded().begin()->first == 1);
    for (const auto& [h, set] : res.facts.ledger.rewarded()) {
        CHECK(h <= 8 - 3);
        CHECK(set == std::vector<ProcessId>{0, 1, 2, 3});  // synchrony: exact
    }
    // Audit over the rewardable range is FAIR.
    for (const auto& v : res.verdicts)
        if (v.name == "FairnessAudit") CHECK(v.status == "FAIR");
}

TEST_CASE("attestations ride commit messages") {
    RunConfig c = plainCfg(4);
    c.netMode = NetMode::Synchronous;
    c.delta = 2;
    c.horizonHeights = 3;
    c.horizonTicks = 4000;
    c.timeoutCommit = 4;
    RunResult res = runOne(c);
    size_t withAttestation = 0;
    for (const auto& e : res.facts.emits)
        if (!e.relay && e.msg.kind == MsgKind::Commit) {
            CHECK(e.msg.attestation.size() == 4);  // everyone participated
            ++withAttestation;
        }
    CHECK(withAttestation == 4 * 3);
}
