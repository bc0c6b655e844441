#include "tmbft/scenarios.hpp"

namespace tmbft {

namespace {

Json golden(ProcessId p, Round endOfRound, const char* locked, Round llr) {
    Json g;
    g["p"] = p;
    g["end_of_round"] = endOfRound;
    g["locked"] = locked;
    if (llr != kNoRound - 1) g["llr"] = llr;
    return g;
}

Json goldenFull(ProcessId p, Round endOfRound, const char* locked, Round llr,
                std::optional<Round> polcr) {
    Json g = golden(p, endOfRound, locked, llr);
    g["polcr"] = polcr ? Json(*polcr) : Json(nullptr);
    return g;
}

Scenario agreementViolation(bool corrected) {
    Scenario s;
    s.name = corrected ? "agreement-violation-corrected" : "agreement-violation-legacy";
    s.description =
        corrected
            ? "The selective schedule that breaks the legacy unlock rule, replayed "
              "with the corrected rule: every decision lands on the first proposal."
            : "Selective deliveries drive the legacy unlock rule into an Agreement "
              "violation: p1 decides the round-1 proposal, p2 a later one.";
    RunConfig& c = s.config;
    c.mode = RunMode::OneShot;
    c.rosterSize = 4;
    c.n = 4;
    c.byzantine = {3};
    c.f = 1;
    c.netMode = NetMode::Asynchronous;
    c.delta = 3;
    c.timeoutPropose = 10;
    c.timeoutPrevote = 10;
    c.unlockRule = corrected ? UnlockRule::Corrected : UnlockRule::Legacy;
    c.seed = 42;
    c.horizonTicks = 600;
    c.adversary.kind = "script_agreement";

    Json goldens = Json::array();
    if (!corrected) {
        // The six end-of-round state lines.
        goldens.push_back(Json{{"p", 0}, {"decided", "B"}});
        goldens.push_back(golden(1, 1, "B", 1));
        goldens.push_back(Json{{"p", 2}, {"end_of_round", 1}, {"locked", "nil"}});
        goldens.push_back(golden(1, 2, "B", 1));
        goldens.push_back(golden(2, 2, "B", 2));
        goldens.push_back(Json{{"p", 1}, {"end_of_round", 3}, {"locked", "nil"}});
        goldens.push_back(golden(2, 3, "B", 2));
        goldens.push_back(Json{{"p", 1}, {"end_of_round", 4}, {"locked", "nil"}});
        goldens.push_back(Json{{"p", 2}, {"end_of_round", 4}, {"locked", "nil"}});
        goldens.push_back(Json{{"p", 1}, {"end_of_round", 5}, {"locked", "nil"}});
        goldens.push_back(Json{{"p", 2}, {"end_of_round", 5}, {"locked", "nil"}});
        goldens.push_back(Json{{"p", 1}, {"decided", "B'"}});
        goldens.push_back(Json{{"p", 2}, {"not_decided", true}});
        goldens.push_back(Json{{"p", 2}, {"last_lock", "B'"}});
        s.expect["verdicts"] = Json{{"OneShotAgreement", "VIOLATED"},
                                    {"OneShotIntegrity", "OK"},
                                    {"OneShotValidity", "OK"}};
    } else {
        goldens.push_back(Json{{"p", 0}, {"decided", "B"}});
        goldens.push_back(Json{{"p", 1}, {"decided", "B"}});
        s.expect["verdicts"] = Json{{"OneShotAgreement", "OK"},
                                    {"OneShotIntegrity", "OK"},
                                    {"OneShotValidity", "OK"}};
    }
    s.expect["goldens"] = goldens;
    return s;
}

Scenario livelock() {
    Scenario s;
    s.name = "livelock";
    s.description =
        "Just-in-time Byzantine prevotes make locks leapfrog between p1 and p3 "
        "forever; no round satisfies the termination side-condition and nobody "
        "decides within the 100-round horizon.";
    RunConfig& c = s.config;
    c.mode = RunMode::OneShot;
    c.rosterSize = 4;
    c.n = 4;
    c.byzantine = {3};
    c.f = 1;
    c.netMode = NetMode::EventuallySynchronous;
    c.tau = 25;
    c.delta = 30;
    c.timeoutPropose = 10;
    c.timeoutPrevote = 10;
    c.seed = 7;
    c.horizonTicks = 60000;
    c.horizonRounds = 100;
    c.adversary.kind = "script_livelock";

    Json goldens = Json::array();
    goldens.push_back(goldenFull(0, 2, "v1", 1, std::nullopt));
    goldens.push_back(goldenFull(1, 2, "nil", -1, std::nullopt));
    goldens.push_back(goldenFull(2, 2, "nil", -1, std::nullopt));
    goldens.push_back(goldenFull(0, 3, "v1", 1, std::nullopt));
    goldens.push_back(goldenFull(1, 3, "nil", -1, std::nullopt));
    goldens.push_back(goldenFull(2, 3, "v3", 3, std::nullopt));
    goldens.push_back(goldenFull(0, 5, "v1", 5, 1));
    goldens.push_back(goldenFull(1, 5, "nil", -1, 1));
    goldens.push_back(goldenFull(2, 5, "v3", 3, 1));
    goldens.push_back(goldenFull(0, 6, "v1", 5, 1));
    goldens.push_back(goldenFull(1, 6, "nil", -1, 1));
    goldens.push_back(goldenFull(2, 6, "v3", 3, 1));
    goldens.push_back(goldenFull(0, 7, "v1", 5, 3));
    goldens.push_back(goldenFull(1, 7, "nil", -1, 3));
    goldens.push_back(goldenFull(2, 7, "v3", 7, 3));
    goldens.push_back(Json{{"p", 0}, {"not_decided", true}});
    goldens.push_back(Json{{"p", 1}, {"not_decided", true}});
    goldens.push_back(Json{{"p", 2}, {"not_decided", true}});
    s.expect["goldens"] = goldens;
    s.expect["verdicts"] = Json{{"TerminationBounded", "FAIL"},
                                {"AssumptionT", "absent"},
                                {"OneShotAgreement", "OK"},
                                {"OneShotIntegrity", "OK"}};
    return s;
}

RunConfig fairnessBase() {
    RunConfig c;
    c.mode = RunMode::Repeated;
    c.rosterSize = 4;
    c.n = 4;
    c.byzantine = {};
    c.f = 1;
    c.netMode = NetMode::EventuallySynchronous;
    c.tau = 0;
    c.delta = 20;
    c.timeoutPropose = 6;
    c.timeoutPrevote = 6;
    c.timeoutCommit = 5;
    c.seed = 11;
    c.horizonHeights = 60;
    c.horizonTicks = 60000;
    c.tailWindow = 10;
    c.adversary.kind = "script_fairness_delay";
    c.adversary.params = Json{{"slow", 3}, {"commit_delay", 15}};
    return c;
}

Scenario fairnessOriginal() {
    Scenario s;
    s.name = "fairness-original";
    s.description =
        "One correct validator's commits always arrive after the next height's "
        "reward snapshot; the original mechanism never rewards it.";
    s.config = fairnessBase();
    s.config.mechanism = MechanismVariant::Original;
    s.expect["verdicts"] = Json{{"FairnessAudit", "NOT-EVENTUALLY-FAIR"},
                                {"RepeatedAgreement", "OK"},
                                {"RepeatedValidity", "OK"},
                                {"TerminationBounded", "PASS"}};
    return s;
}

Scenario fairnessModulable() {
    Scenario s;
    s.name = "fairness-modulable-f1";
    s.description =
        "Same delay pattern under modulable timeouts with the f+1 commit filter: "
        "the commit window grows until it covers the delay, then every height is fair.";
    s.config = fairnessBase();
    s.config.mechanism = MechanismVariant::ModulableF1Filter;
    s.expect["verdicts"] = Json{{"FairnessAudit", "EVENTUALLY-FAIR(11)"},
                                {"RepeatedAgreement", "OK"},
                                {"RepeatedValidity", "OK"},
                                {"TerminationBounded", "PASS"}};
    return s;
}

Scenario asyncDefer(MechanismVariant mech, const char* name) {
    Scenario s;
    s.name = name;
    s.description =
        "Asynchronous scheduler defers one correct validator's commit past every "
        "height's reward snapshot; condition 4 violations recur to the horizon.";
    s.config = fairnessBase();
    s.config.netMode = NetMode::Asynchronous;
    s.config.mechanism = mech;
    s.config.delayX = 1;
    s.config.seed = 13;
    s.config.horizonHeights = 40;
    s.config.adversary.kind = "script_async_defer";
    s.config.adversary.params = Json{{"victim", 3}};
    s.expect["verdicts"] = Json{{"FairnessAudit", "NOT-EVENTUALLY-FAIR"},
                                {"RepeatedAgreement", "OK"},
                                {"RepeatedValidity", "OK"}};
    return s;
}

Scenario delayedRewardSync() {
    Scenario s;
    s.name = "delayed-reward-sync";
    s.description =
        "Fully synchronous run with the delay-x reward mechanism (x=1): every "
        "rewardable height audits fair.";
    RunConfig& c = s.config;
    c.mode = RunMode::Repeated;
    c.rosterSize = 4;
    c.n = 4;
    c.f = 1;
    c.netMode = NetMode::Synchronous;
    c.delta = 2;
    c.timeoutPropose = 8;
    c.timeoutPrevote = 8;
    c.timeoutCommit = 5;
    c.mechanism = MechanismVariant::DelayedX;
    c.delayX = 1;
    c.seed = 17;
    c.horizonHeights = 52;
    c.horizonTicks = 20000;
    s.expect["verdicts"] = Json{{"FairnessAudit", "FAIR"},
                                {"RepeatedAgreement", "OK"},
                                {"RepeatedValidity", "OK"},
                                {"TerminationBounded", "PASS"}};
    return s;
}

Scenario honestRepeated(bool withFault) {
    Scenario s;
    s.name = withFault ? "honest-repeated-f1" : "honest-repeated";
    s.description =
        "20-height repeated consensus with a rotating validator set over a six "
        "process roster; all correct outputs must match.";
    RunConfig& c = s.config;
    c.mode = RunMode::Repeated;
    c.rosterSize = 6;
    c.n = 4;
    if (withFault) c.byzantine = {4};
    c.f = 1;
    c.netMode = NetMode::Synchronous;
    c.delta = 2;
    c.timeoutPropose = 8;
    c.timeoutPrevote = 8;
    c.timeoutCommit = 4;
    c.selector = SelectorKind::Rotating;
    c.stakes = {3, 2, 2, 1, 1, 1};
    c.seed = 23;
    c.horizonHeights = 20;
    c.horizonTicks = 20000;
    s.expect["verdicts"] = Json{{"RepeatedAgreement", "OK"},
                                {"RepeatedValidity", "OK"},
                                {"SelectorDeterminism", "OK"},
                                {"TerminationBounded", "PASS"}};
    return s;
}

}  // namespace

std::vector<Scenario> builtinScenarios() {
    std::vector<Scenario> out;
    out.push_back(agreementViolation(false));
    out.push_back(agreementViolation(true));
    out.push_back(livelock());
    out.push_back(fairnessOriginal());
    out.push_back(fairnessModulable());
    out.push_back(asyncDefer(MechanismVariant::Original, "async-defer-original"));
    out.push_back(asyncDefer(MechanismVariant::Modulable, "async-defer-modulable"));
    out.push_back(
        asyncDefer(MechanismVariant::ModulableF1Filter, "async-defer-modulable-f1"));
    out.push_back(asyncDefer(MechanismVariant::DelayedX, "async-defer-delayed-x"));
    out.push_back(delayedRewardSync());
    out.push_back(honestRepeated(false));
    out.push_back(honestRepeated(true));
    return out;
}

const Scenario* findBuiltinScenario(const std::string& name) {
    static const std::vector<Scenario> all = builtinScenarios();
    for (const auto& s : all)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace tmbft
