#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "tmbft/runner.hpp"

using namespace tmbft;

namespace {

int runByName(const std::string& name, std::ostream& log) {
    const Scenario* sc = findBuiltinScenario(name);
    REQUIRE(sc != nullptr);
    return runScenario(*sc, "", log);
}

}  // namespace

TEST_CASE("every built-in scenario meets its expectations") {
    for (const Scenario& sc : builtinScenarios()) {
        std::ostringstream log;
        int rc = runScenario(sc, "", log);
        INFO(sc.name, "\n", log.str());
        CHECK(rc == 0);
    }
}

TEST_CASE("scenario files round-trip and stay runnable") {
    const Scenario* sc = findBuiltinScenario("agreement-violation-legacy");
    REQUIRE(sc != nullptr);
    Json j = scenarioToJson(*sc);
    std::string path = "/tmp/tmbft_scenario_roundtrip.json";
    {
        std::ofstream f(path);
        f << j.dump(2);
    }
    Scenario loaded = loadScenarioFile(path);
    CHECK(loaded.name == sc->name);
    CHECK(runConfigToJson(loaded.config) == runConfigToJson(sc->config));
    std::ostringstream log;
    CHECK(runScenario(loaded, "", log) == 0);
}

TEST_CASE("the livelock schedule stops repeating once the Byzantine helper stops") {
    // Same config, adversary withheld entirely: with only three correct
    // validators online, the first post-GST proposer finds no locked
    // obstruction... but nothing can lock either; the run must simply not
    // decide on anything invalid and never violate safety.
    const Scenario* sc = findBuiltinScenario("livelock");
    REQUIRE(sc != nullptr);
    RunConfig c = sc->config;
    c.adversary.kind = "none";
    c.horizonRounds = 20;
    c.horizonTicks = 4000;
    RunResult res = runOne(c);
    for (const auto& v : res.verdicts) {
        if (v.name == "OneShotAgreement" || v.name == "OneShotValidity" ||
            v.name == "OneShotIntegrity")
            CHECK(v.status == "OK");
    }
}

TEST_CASE("assumption-T counter-example wiring: nil quorum clears the field") {
    // A synchronous all-correct run: every process enters round 1 unlocked,
    // the proposer is correct, the monitor finds round 1 T-satisfying.
    RunConfig c;
    c.mode = RunMode::OneShot;
    c.rosterSize = 4;
    c.n = 4;
    c.f = 1;
    c.netMode = NetMode::Synchronous;
    c.delta = 2;
    c.seed = 3;
    c.horizonTicks = 2000;
    RunResult res = runOne(c);
    TMonitorResult t = assumptionTMonitor(res.facts, 1);
    CHECK(t.satisfied);
    CHECK(t.round == 1);
    CHECK(assumptionTHolds(res.facts, 1));
}

TEST_CASE("unknown scenario names are rejected") {
    CHECK(findBuiltinScenario("no-such-scenario") == nullptr);
    std::ostringstream log;
    CHECK(runByName("honest-repeated", log) == 0);
}

TEST_CASE("a nil-quorum round clears the field for the T monitor") {
    // Round 1's proposer is the silent Byzantine validator: no proposal, a
    // full nil prevote quorum, no locks. Round 2's correct proposer then
    // faces zero locked correct processes, so the monitor must fire there.
    RunConfig c;
    c.mode = RunMode::OneShot;
    c.rosterSize = 4;
    c.n = 4;
    c.f = 1;
    c.byzantine = {3};
    c.proposerOffset = 3;  // rotation starts at p4
    c.netMode = NetMode::Synchronous;
    c.delta = 2;
    c.seed = 21;
    c.horizonTicks = 2000;
    RunResult res = runOne(c);
    // Round 1 produced a nil prevote quorum at every correct validator.
    size_t nilPrevotes = 0;
    for (const auto& e : res.facts.emits)
        if (!e.relay && e.msg.kind == MsgKind::Prevote && e.msg.round == 1 &&
            e.msg.value.isNil())
            ++nilPrevotes;
    CHECK(nilPrevotes == 3);
    TMonitorResult t = assumptionTMonitor(res.facts, 1);
    CHECK(t.satisfied);
    CHECK(t.round == 2);
    // And with the field clear, round 2 decides.
    for (const auto& v : res.verdicts)
        if (v.name == "TerminationBounded") CHECK(v.status == "PASS");
}
