// Batch runner for the consensus simulation lab: executes runs and scripted
// scenarios, drives fuzz campaigns and re-checks recorded traces.
//
// Exit codes: 0 = all expectations met (including expected violations),
// 1 = unexpected verdict, 2 = usage or configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tmbft/runner.hpp"

using namespace tmbft;

namespace {

// Field-level flag overrides applied on top of the loaded (or default)
// config; the flags mirror the config fields.
struct Overrides {
    Json patch = Json::object();
    void apply(RunConfig& cfg) const {
        if (patch.empty()) return;
        Json merged = runConfigToJson(cfg);
        merged.merge_patch(patch);
        cfg = runConfigFromJson(merged);
    }
};

int cmdRun(const std::string& configPath, const std::string& scenarioName,
           uint64_t seed, bool seedSet, const std::string& outDir,
           const Overrides& ov) {
    if (!seedSet) {
        std::cerr << "error: --seed is required (runs never draw wall-clock entropy)\n";
        return 2;
    }
    try {
        if (!scenarioName.empty()) {
            Scenario sc;
            if (const Scenario* builtin = findBuiltinScenario(scenarioName)) {
                sc = *builtin;
            } else {
                sc = loadScenarioFile(scenarioName);
            }
            sc.config.seed = seed;
            ov.apply(sc.config);
            return runScenario(sc, outDir, std::cout);
        }
        RunConfig cfg;
        if (!configPath.empty()) {
            std::ifstream f(configPath);
            if (!f) {
                std::cerr << "error: cannot open config: " << configPath << "\n";
                return 2;
            }
            Json j = Json::parse(f);
            if (j.contains("config")) {  // a scenario file
                Scenario sc = scenarioFromJson(j);
                sc.config.seed = seed;
                ov.apply(sc.config);
                return runScenario(sc, outDir, std::cout);
            }
            cfg = runConfigFromJson(j);
        }
        cfg.seed = seed;
        ov.apply(cfg);
        cfg.validate();
        RunResult res = runOne(cfg, outDir);
        for (const auto& v : res.verdicts) std::cout << v.name << ": " << v.status << "\n";
        for (const auto& v : res.verdicts)
            if (v.status == "VIOLATED" || v.status == "FAIL") return 1;
        return 0;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmdFuzz(const std::string& campaignPath, uint64_t seed, bool seedSet,
            const std::string& outDir) {
    if (!seedSet) {
        std::cerr << "error: --seed is required\n";
        return 2;
    }
    try {
        FuzzCampaign fc;
        if (!campaignPath.empty()) {
            std::ifstream f(campaignPath);
            if (!f) {
                std::cerr << "error: cannot open campaign: " << campaignPath << "\n";
                return 2;
            }
            fc = FuzzCampaign::fromJson(Json::parse(f));
        }
        fc.seedStart = seed;
        FuzzSummary sum = runFuzz(fc, outDir, std::cout);
        std::cout << sum.toJson().dump(2) << "\n";
        return sum.failures.empty() ? 0 : 1;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmdCheck(const std::string& tracePath) {
    try {
        std::vector<Verdict> vs = checkTraceFile(tracePath, std::cout);
        for (const auto& v : vs)
            if (v.status == "VIOLATED") return 1;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmdScenariosList() {
    for (const auto& s : builtinScenarios())
        std::cout << s.name << "\n    " << s.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tmbft: deterministic BFT consensus simulation lab"};
    app.require_subcommand(1);

    std::string configPath, scenarioName, outDir, campaignPath, tracePath;
    uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "execute one run or scenario");
    run->add_option("--config", configPath, "run config (JSON)");
    run->add_option("--scenario", scenarioName, "built-in scenario name or file");
    auto* runSeed = run->add_option("--seed", seed, "run seed (required)");
    run->add_option("--out", outDir, "artifact output directory");

    // Field overrides mirroring the run-config schema.
    std::string oMode, oNet, oUnlock, oMechanism, oSelector;
    int oRoster = -1, oN = -1, oF = -1, oHeights = -1, oRounds = -1, oX = -1;
    std::vector<ProcessId> oByz;
    Tick oTau = -1, oDelta = -1, oTicks = -1;
    run->add_option("--mode", oMode, "oneshot | repeated");
    run->add_option("--roster", oRoster, "processes in the run");
    run->add_option("--n", oN, "validator-set size");
    run->add_option("--byzantine", oByz, "Byzantine process ids")->delimiter(',');
    run->add_option("--f", oF, "declared fault tolerance");
    run->add_option("--net", oNet, "synchronous | eventually_synchronous | asynchronous");
    run->add_option("--tau", oTau, "GST tick");
    run->add_option("--delta", oDelta, "post-GST delivery bound");
    run->add_option("--unlock-rule", oUnlock, "corrected | legacy");
    run->add_option("--mechanism", oMechanism,
                    "original | modulable | modulable_f1filter | delayed_x");
    run->add_option("--x", oX, "delay parameter for delayed_x");
    run->add_option("--selector", oSelector, "static | rotating");
    run->add_option("--heights", oHeights, "repeated-mode height horizon");
    run->add_option("--rounds", oRounds, "one-shot round horizon");
    run->add_option("--ticks", oTicks, "tick horizon");

    auto* fuzz = app.add_subcommand("fuzz", "seeded fuzz campaign");
    fuzz->add_option("--campaign", campaignPath, "campaign config (JSON)");
    auto* fuzzSeed = fuzz->add_option("--seed", seed, "base seed (required)");
    fuzz->add_option("--out", outDir, "artifact output directory");

    auto* check = app.add_subcommand("check", "re-evaluate properties over a trace");
    check->add_option("trace", tracePath, "trace file (JSON lines)")->required();

    auto* scen = app.add_subcommand("scenarios", "scenario utilities");
    auto* list = scen->add_subcommand("list", "list built-in scenarios");

    const char* envOut = std::getenv("TMBFT_OUT");
    if (outDir.empty() && envOut) outDir = envOut;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        Overrides ov;
        if (!oMode.empty()) ov.patch["mode"] = oMode;
        if (oRoster >= 0) ov.patch["roster_size"] = oRoster;
        if (oN >= 0) ov.patch["n"] = oN;
        if (run->count("--byzantine")) ov.patch["byzantine"] = oByz;
        if (oF >= 0) ov.patch["f"] = oF;
        if (!oNet.empty()) ov.patch["network"]["mode"] = oNet;
        if (oTau >= 0) ov.patch["network"]["tau"] = oTau;
        if (oDelta >= 0) ov.patch["network"]["delta"] = oDelta;
        if (!oUnlock.empty()) ov.patch["unlock_rule"] = oUnlock;
        if (!oMechanism.empty()) ov.patch["mechanism"]["variant"] = oMechanism;
        if (oX >= 0) ov.patch["mechanism"]["x"] = oX;
        if (!oSelector.empty()) ov.patch["selector"] = oSelector;
        if (oHeights >= 0) ov.patch["horizon"]["heights"] = oHeights;
        if (oRounds >= 0) ov.patch["horizon"]["rounds"] = oRounds;
        if (oTicks >= 0) ov.patch["horizon"]["ticks"] = oTicks;
        bool haveShape = !configPath.empty() || !scenarioName.empty() ||
                         !ov.patch.empty();
        if (!haveShape) {
            std::cerr << "error: run needs --config, --scenario, or field flags\n";
            return 2;
        }
        return cmdRun(configPath, scenarioName, seed, runSeed->count() > 0, outDir, ov);
    }
    if (fuzz->parsed()) return cmdFuzz(campaignPath, seed, fuzzSeed->count() > 0, outDir);
    if (check->parsed()) return cmdCheck(tracePath);
    if (scen->parsed() && list->parsed()) return cmdScenariosList();
    std::cerr << "error: unknown command\n";
    return 2;
}
