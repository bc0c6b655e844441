#include "tmbft/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tmbft/adversary.hpp"
#include "tmbft/netsim.hpp"

namespace tmbft {

namespace fs = std::filesystem;

Json buildReport(const RunConfig& cfg, const std::vector<Verdict>& verdicts,
                 const RunFacts& facts) {
    Json j;
    j["config"] = runConfigToJson(cfg);
    j["verdicts"] = verdictsToJson(verdicts);
    Json summary;
    int oneshotDecides = 0, outputs = 0;
    for (const auto& d : facts.decides) (d.output ? outputs : oneshotDecides)++;
    summary["oneshot_decides"] = oneshotDecides;
    summary["outputs"] = outputs;
    summary["end_time"] = facts.endTime;
    summary["emissions"] = facts.emits.size();
    summary["deliveries"] = facts.delivers.size();
    j["summary"] = summary;
    return j;
}

RunResult runOne(const RunConfig& cfg, const std::string& outDir, const std::string& tag) {
    RunResult res;
    res.cfg = cfg;
    {
        Simulator sim(cfg, makeAdversary(cfg));
        sim.run();
        res.trace = sim.trace();
    }
    res.facts = RunFacts::extract(cfg, res.trace);
    res.verdicts = checkProperties(res.facts);
    res.report = buildReport(cfg, res.verdicts, res.facts);
    if (!outDir.empty()) {
        fs::create_directories(outDir);
        res.trace.writeJsonl(outDir + "/" + tag + ".trace.jsonl");
        std::ofstream f(outDir + "/" + tag + ".report.json", std::ios::binary);
        f << res.report.dump(2) << "\n";
    }
    return res;
}

namespace {

bool statusMatches(const std::string& expected, const std::string& actual) {
    if (!expected.empty() && expected.back() == '*')
        return actual.rfind(expected.substr(0, expected.size() - 1), 0) == 0;
    return expected == actual;
}

}  // namespace

int runScenario(const Scenario& sc, const std::string& outDir, std::ostream& log) {
    RunResult res = runOne(sc.config, outDir, sc.name);
    bool ok = true;

    if (sc.expect.contains("goldens")) {
        Verdict g = checkGoldenStates(res.facts, sc.expect.at("goldens"));
        res.verdicts.push_back(g);
        log << "  GoldenStates: " << g.status;
        if (!g.detail.empty()) log << "  [" << g.detail << "]";
        log << "\n";
        if (g.status != "PASS") ok = false;
    }
    if (sc.expect.contains("verdicts")) {
        for (const auto& [name, expected] : sc.expect.at("verdicts").items()) {
            std::string want = expected.get<std::string>();
            bool found = false;
            for (const auto& v : res.verdicts) {
                if (v.name != name) continue;
                found = true;
                bool match = statusMatches(want, v.status);
                log << "  " << name << ": " << v.status
                    << (match ? "" : "  (expected " + want + ")") << "\n";
                if (!match) ok = false;
            }
            if (!found) {
                log << "  " << name << ": missing (expected " << want << ")\n";
                ok = false;
            }
        }
    }
    if (!outDir.empty()) {
        res.report["expect"] = sc.expect;
        res.report["expectations_met"] = ok;
        std::ofstream f(outDir + "/" + sc.name + ".report.json", std::ios::binary);
        f << res.report.dump(2) << "\n";
    }
    log << "scenario " << sc.name << ": " << (ok ? "expectations met" : "MISMATCH")
        << "\n";
    return ok ? 0 : 1;
}

Json FuzzCampaign::toJson() const {
    Json j;
    j["seed_start"] = seedStart;
    j["runs"] = runs;
    Json g = Json::array();
    for (auto [n, f] : grid) g.push_back(Json{{"n", n}, {"f", f}});
    j["grid"] = g;
    Json m = Json::array();
    for (NetMode mo : modes) m.push_back(netModeName(mo));
    j["modes"] = m;
    j["unlock_rule"] = unlockRule == UnlockRule::Corrected ? "corrected" : "legacy";
    j["run_mode"] = runMode == RunMode::OneShot ? "oneshot" : "repeated";
    j["mix"] = Json{{"silent", mix.silent},
                    {"equivocate", mix.equivocate},
                    {"selective_send", mix.selectiveSend},
                    {"stale_replay", mix.staleReplay},
                    {"invalid_proposal", mix.invalidProposal},
                    {"split_brain", mix.splitBrain}};
    j["horizon_ticks"] = horizonTicks;
    j["horizon_heights"] = horizonHeights;
    j["max_pre_gst_delay"] = maxPreGstDelay;
    return j;
}

FuzzCampaign FuzzCampaign::fromJson(const Json& j) {
    FuzzCampaign fc;
    fc.seedStart = j.value("seed_start", uint64_t{1});
    fc.runs = j.value("runs", 100);
    if (j.contains("grid")) {
        fc.grid.clear();
        for (const auto& g : j.at("grid"))
            fc.grid.emplace_back(g.at("n").get<int>(), g.at("f").get<int>());
    }
    if (j.contains("modes")) {
        fc.modes.clear();
        for (const auto& m : j.at("modes")) {
            std::string s = m.get<std::string>();
            if (s == "synchronous") fc.modes.push_back(NetMode::Synchronous);
            else if (s == "eventually_synchronous")
                fc.modes.push_back(NetMode::EventuallySynchronous);
            else fc.modes.push_back(NetMode::Asynchronous);
        }
    }
    fc.unlockRule =
        j.value("unlock_rule", "corrected") == "legacy" ? UnlockRule::Legacy
                                                        : UnlockRule::Corrected;
    fc.runMode = j.value("run_mode", "oneshot") == "repeated" ? RunMode::Repeated
                                                              : RunMode::OneShot;
    if (j.contains("mix")) {
        const Json& m = j.at("mix");
        fc.mix.silent = m.value("silent", 1);
        fc.mix.equivocate = m.value("equivocate", 1);
        fc.mix.selectiveSend = m.value("selective_send", 1);
        fc.mix.staleReplay = m.value("stale_replay", 1);
        fc.mix.invalidProposal = m.value("invalid_proposal", 1);
        fc.mix.splitBrain = m.value("split_brain", 0);
    }
    fc.horizonTicks = j.value("horizon_ticks", Tick{3000});
    fc.horizonHeights = j.value("horizon_heights", 5);
    fc.maxPreGstDelay = j.value("max_pre_gst_delay", Tick{30});
    return fc;
}

Json FuzzSummary::toJson() const {
    Json j;
    j["runs"] = runs;
    j["decided"] = decided;
    j["t_satisfied"] = tSatisfied;
    j["t_satisfied_and_decided"] = tSatisfiedAndDecided;
    Json v = Json::object();
    for (const auto& [name, count] : violations) v[name] = count;
    j["violations"] = v;
    j["failures"] = failures;
    return j;
}

RunConfig fuzzRunConfig(const FuzzCampaign& fc, int index) {
    size_t cell = static_cast<size_t>(index) %
                  (fc.grid.size() * fc.modes.size());
    size_t gi = cell % fc.grid.size();
    size_t mi = cell / fc.grid.size();
    auto [n, f] = fc.grid[gi];
    RunConfig c;
    c.mode = fc.runMode;
    c.rosterSize = n;
    c.n = n;
    c.f = f;
    for (int b = 0; b < f; ++b) c.byzantine.push_back(n - 1 - b);
    c.netMode = fc.modes[mi];
    c.seed = fc.seedStart + static_cast<uint64_t>(index);
    // Deterministic per-run GST inside the first quarter of the horizon.
    c.tau = static_cast<Tick>((c.seed * 2654435761ull) % 60);
    c.delta = 3;
    c.maxPreGstDelay = fc.maxPreGstDelay;
    c.timeoutPropose = 10;
    c.timeoutPrevote = 10;
    c.timeoutCommit = 5;
    c.unlockRule = fc.unlockRule;
    c.horizonTicks = fc.horizonTicks;
    c.horizonHeights = fc.runMode == RunMode::Repeated ? fc.horizonHeights : 0;
    c.adversary.kind = f > 0 ? "random" : "none";
    c.adversary.mix = fc.mix;
    return c;
}

FuzzSummary runFuzz(const FuzzCampaign& fc, const std::string& outDir,
                    std::ostream& log) {
    FuzzSummary sum;
    static const std::vector<std::string> zeroTolerance = {
        "OneShotIntegrity", "OneShotValidity", "OneShotAgreement",
        "RepeatedAgreement", "RepeatedValidity", "NoForgery", "LockMonotonicity"};
    for (int i = 0; i < fc.runs; ++i) {
        RunConfig cfg = fuzzRunConfig(fc, i);
        RunResult res = runOne(cfg);
        ++sum.runs;
        bool failed = false;
        for (const auto& v : res.verdicts) {
            if (v.status == "VIOLATED") {
                ++sum.violations[v.name];
                for (const auto& z : zeroTolerance)
                    if (v.name == z) failed = true;
            }
        }
        bool allDecided = false;
        for (const auto& v : res.verdicts)
            if (v.name == "TerminationBounded") allDecided = v.status == "PASS";
        bool tSat = assumptionTHolds(res.facts, 1);
        if (allDecided) ++sum.decided;
        if (tSat) {
            ++sum.tSatisfied;
            if (allDecided) ++sum.tSatisfiedAndDecided;
        }
        if (failed) {
            Json repro = runConfigToJson(cfg);
            sum.failures.push_back(repro);
            if (!outDir.empty()) {
                fs::create_directories(outDir);
                std::ofstream f(outDir + "/repro-" + std::to_string(cfg.seed) + ".json",
                                std::ios::binary);
                f << repro.dump(2) << "\n";
            }
        }
    }
    log << "fuzz: " << sum.runs << " runs, " << sum.failures.size()
        << " safety failures\n";
    if (!outDir.empty()) {
        fs::create_directories(outDir);
        std::ofstream f(outDir + "/fuzz-summary.json", std::ios::binary);
        Json j;
        j["campaign"] = fc.toJson();
        j["summary"] = sum.toJson();
        f << j.dump(2) << "\n";
    }
    return sum;
}

std::vector<Verdict> checkTraceFile(const std::string& path, std::ostream& log) {
    Trace tr = Trace::readJsonl(path);
    RunConfig cfg;
    bool haveMeta = false;
    for (const auto& r : tr.records()) {
        if (r.kind == TraceRecord::Kind::Meta) {
            cfg = runConfigFromJson(r.body);
            haveMeta = true;
            break;
        }
    }
    if (!haveMeta) throw std::runtime_error("trace has no meta record");
    RunFacts facts = RunFacts::extract(cfg, tr);
    std::vector<Verdict> vs = checkProperties(facts);
    for (const auto& v : vs) log << v.name << ": " << v.status << "\n";
    return vs;
}

}  // namespace tmbft
