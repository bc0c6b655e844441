#include "tmbft/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace tmbft {

const char* netModeName(NetMode m) {
    switch (m) {
        case NetMode::Synchronous: return "synchronous";
        case NetMode::EventuallySynchronous: return "eventually_synchronous";
        case NetMode::Asynchronous: return "asynchronous";
    }
    return "?";
}

const char* mechanismName(MechanismVariant m) {
    switch (m) {
        case MechanismVariant::Original: return "original";
        case MechanismVariant::Modulable: return "modulable";
        case MechanismVariant::ModulableF1Filter: return "modulable_f1filter";
        case MechanismVariant::DelayedX: return "delayed_x";
    }
    return "?";
}

namespace {

NetMode netModeFromName(const std::string& s) {
    for (NetMode m : {NetMode::Synchronous, NetMode::EventuallySynchronous,
                      NetMode::Asynchronous})
        if (s == netModeName(m)) return m;
    throw std::invalid_argument("unknown network mode: " + s);
}

MechanismVariant mechanismFromName(const std::string& s) {
    for (MechanismVariant m :
         {MechanismVariant::Original, MechanismVariant::Modulable,
          MechanismVariant::ModulableF1Filter, MechanismVariant::DelayedX})
        if (s == mechanismName(m)) return m;
    throw std::invalid_argument("unknown mechanism: " + s);
}

}  // namespace

std::vector<ProcessId> RunConfig::roster() const {
    std::vector<ProcessId> r(rosterSize);
    for (int i = 0; i < rosterSize; ++i) r[i] = i;
    return r;
}

std::vector<ProcessId> RunConfig::correct() const {
    std::vector<ProcessId> out;
    for (ProcessId p = 0; p < rosterSize; ++p)
        if (!isByzantine(p)) out.push_back(p);
    return out;
}

bool RunConfig::isByzantine(ProcessId p) const {
    return std::find(byzantine.begin(), byzantine.end(), p) != byzantine.end();
}

Tick RunConfig::effectiveTau() const {
    switch (netMode) {
        case NetMode::Synchronous: return 0;
        case NetMode::EventuallySynchronous: return tau;
        case NetMode::Asynchronous: return kTickMax;
    }
    return 0;
}

void RunConfig::validate() const {
    if (rosterSize < 1) throw std::invalid_argument("roster must be non-empty");
    if (n < 1 || n > rosterSize)
        throw std::invalid_argument("validator-set size must be in [1, roster]");
    if (!unsafeFaults && f * 3 >= n)
        throw std::invalid_argument("f < n/3 required (set unsafe_faults to override)");
    if (static_cast<int>(byzantine.size()) > f && !unsafeFaults)
        throw std::invalid_argument("more Byzantine processes than declared f");
    for (ProcessId b : byzantine)
        if (b < 0 || b >= rosterSize)
            throw std::invalid_argument("byzantine id outside roster");
    if (timeoutPropose <= 0 || timeoutPrevote <= 0 || timeoutCommit <= 0 || delta <= 0)
        throw std::invalid_argument("all durations must be positive");
    if (horizonTicks <= 0) throw std::invalid_argument("horizon must be positive");
    if (mode == RunMode::Repeated && horizonHeights <= 0)
        throw std::invalid_argument("repeated mode needs horizon_heights");
    if (!stakes.empty() && static_cast<int>(stakes.size()) != rosterSize)
        throw std::invalid_argument("stakes must match roster size");
}

Json runConfigToJson(const RunConfig& c) {
    Json j;
    j["mode"] = c.mode == RunMode::OneShot ? "oneshot" : "repeated";
    j["roster_size"] = c.rosterSize;
    j["n"] = c.n;
    j["byzantine"] = c.byzantine;
    j["f"] = c.f;
    j["unsafe_faults"] = c.unsafeFaults;
    j["network"] = Json{{"mode", netModeName(c.netMode)},
                        {"tau", c.tau},
                        {"delta", c.delta},
                        {"max_pre_gst_delay", c.maxPreGstDelay}};
    j["timeouts"] = Json{{"propose", c.timeoutPropose},
                         {"prevote", c.timeoutPrevote},
                         {"commit", c.timeoutCommit}};
    j["unlock_rule"] = c.unlockRule == UnlockRule::Corrected ? "corrected" : "legacy";
    j["accept_any_proposer"] = c.acceptAnyProposer;
    j["proposer_offset"] = c.proposerOffset;
    j["mechanism"] = Json{{"variant", mechanismName(c.mechanism)}, {"x", c.delayX}};
    j["selector"] = c.selector == SelectorKind::Static ? "static" : "rotating";
    j["stakes"] = c.stakes;
    j["seed"] = c.seed;
    j["horizon"] = Json{{"ticks", c.horizonTicks},
                        {"rounds", c.horizonRounds},
                        {"heights", c.horizonHeights}};
    j["tail_window"] = c.tailWindow;
    j["adversary"] = Json{{"kind", c.adversary.kind},
                          {"mix",
                           Json{{"silent", c.adversary.mix.silent},
                                {"equivocate", c.adversary.mix.equivocate},
                                {"selective_send", c.adversary.mix.selectiveSend},
                                {"stale_replay", c.adversary.mix.staleReplay},
                                {"invalid_proposal", c.adversary.mix.invalidProposal},
                                {"split_brain", c.adversary.mix.splitBrain}}},
                          {"params", c.adversary.params}};
    return j;
}

RunConfig runConfigFromJson(const Json& j) {
    RunConfig c;
    std::string mode = j.value("mode", "oneshot");
    if (mode == "oneshot") c.mode = RunMode::OneShot;
    else if (mode == "repeated") c.mode = RunMode::Repeated;
    else throw std::invalid_argument("unknown run mode: " + mode);
    c.rosterSize = j.value("roster_size", 4);
    c.n = j.value("n", c.rosterSize);
    c.byzantine = j.value("byzantine", std::vector<ProcessId>{});
    c.f = j.value("f", static_cast<int>(c.byzantine.size()));
    c.unsafeFaults = j.value("unsafe_faults", false);
    if (j.contains("network")) {
        const Json& net = j.at("network");
        c.netMode = netModeFromName(net.value("mode", "synchronous"));
        c.tau = net.value("tau", Tick{0});
        c.delta = net.value("delta", Tick{3});
        c.maxPreGstDelay = net.value("max_pre_gst_delay", Tick{40});
    }
    if (j.contains("timeouts")) {
        const Json& t = j.at("timeouts");
        c.timeoutPropose = t.value("propose", Tick{10});
        c.timeoutPrevote = t.value("prevote", Tick{10});
        c.timeoutCommit = t.value("commit", Tick{5});
    }
    std::string rule = j.value("unlock_rule", "corrected");
    if (rule == "corrected") c.unlockRule = UnlockRule::Corrected;
    else if (rule == "legacy") c.unlockRule = UnlockRule::Legacy;
    else throw std::invalid_argument("unknown unlock rule: " + rule);
    c.acceptAnyProposer = j.value("accept_any_proposer", false);
    c.proposerOffset = j.value("proposer_offset", 0);
    if (j.contains("mechanism")) {
        c.mechanism = mechanismFromName(j.at("mechanism").value("variant", "original"));
        c.delayX = j.at("mechanism").value("x", 1);
    }
    std::string sel = j.value("selector", "static");
    if (sel == "static") c.selector = SelectorKind::Static;
    else if (sel == "rotating") c.selector = SelectorKind::Rotating;
    else throw std::invalid_argument("unknown selector: " + sel);
    c.stakes = j.value("stakes", std::vector<int>{});
    c.seed = j.value("seed", uint64_t{0});
    if (j.contains("horizon")) {
        const Json& h = j.at("horizon");
        c.horizonTicks = h.value("ticks", Tick{4000});
        c.horizonRounds = h.value("rounds", 0);
        c.horizonHeights = h.value("heights", 0);
    }
    c.tailWindow = j.value("tail_window", 10);
    if (j.contains("adversary")) {
        const Json& a = j.at("adversary");
        c.adversary.kind = a.value("kind", "none");
        if (a.contains("mix")) {
            const Json& m = a.at("mix");
            c.adversary.mix.silent = m.value("silent", 1);
            c.adversary.mix.equivocate = m.value("equivocate", 1);
            c.adversary.mix.selectiveSend = m.value("selective_send", 1);
            c.adversary.mix.staleReplay = m.value("stale_replay", 1);
            c.adversary.mix.invalidProposal = m.value("invalid_proposal", 1);
            c.adversary.mix.splitBrain = m.value("split_brain", 0);
        }
        c.adversary.params = a.value("params", Json::object());
    }
    return c;
}

Json scenarioToJson(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    j["description"] = s.description;
    j["config"] = runConfigToJson(s.config);
    j["expect"] = s.expect;
    return j;
}

Scenario scenarioFromJson(const Json& j) {
    Scenario s;
    s.name = j.value("name", "unnamed");
    s.description = j.value("description", "");
    s.config = runConfigFromJson(j.at("config"));
    s.expect = j.value("expect", Json::object());
    return s;
}

Scenario loadScenarioFile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open scenario file: " + path);
    Json j = Json::parse(f);
    return scenarioFromJson(j);
}

}  // namespace tmbft
