#include "tmbft/checkers.hpp"

#include <algorithm>
#include <sstream>

#include "tmbft/quorum.hpp"

namespace tmbft {

Json Verdict::toJson() const {
    Json j;
    j["name"] = name;
    j["status"] = status;
    j["detail"] = detail;
    j["witnesses"] = witnesses;
    return j;
}

Json verdictsToJson(const std::vector<Verdict>& vs) {
    Json arr = Json::array();
    for (const auto& v : vs) arr.push_back(v.toJson());
    return arr;
}

std::vector<ProcessId> RunFacts::validatorsAt(Height h) const {
    auto it = validatorSets.find(h);
    if (it != validatorSets.end() && !it->second.empty())
        return it->second.begin()->second;
    std::vector<ProcessId> v;
    for (int i = 0; i < cfg.n; ++i) v.push_back(i);
    return v;
}

RunFacts RunFacts::extract(const RunConfig& cfg, const Trace& trace) {
    RunFacts f;
    f.cfg = cfg;
    for (const TraceRecord& rec : trace.records()) {
        f.endTime = std::max(f.endTime, rec.time);
        const Json& b = rec.body;
        switch (rec.kind) {
            case TraceRecord::Kind::Emit: {
                EmitRec e;
                e.emission = b.at("emission").get<uint64_t>();
                e.emitter = rec.process;
                e.relay = b.at("relay").get<bool>();
                e.msg = messageFromJson(b.at("msg"));
                e.time = rec.time;
                e.rec = rec.id;
                f.emits.push_back(std::move(e));
                break;
            }
            case TraceRecord::Kind::Drop:
                f.drops.emplace_back(rec.id, b.value("emission", uint64_t{0}));
                break;
            case TraceRecord::Kind::Evidence: {
                std::string why = b.value("why", "");
                if (why.find("equivocation") != std::string::npos)
                    f.equivocationEvidence.emplace_back(rec.id,
                                                        messageFromJson(b.at("msg")));
                break;
            }
            case TraceRecord::Kind::Deliver: {
                DeliverRec d;
                d.p = rec.process;
                d.emission = b.at("emission").get<uint64_t>();
                d.time = rec.time;
                d.rec = rec.id;
                f.delivers.push_back(d);
                break;
            }
            case TraceRecord::Kind::Timer: {
                TimerRec t;
                t.p = rec.process;
                t.op = b.value("op", "");
                t.kind = b.value("kind", "");
                t.value = b.contains("duration") ? b.at("duration").get<Tick>()
                                                 : b.value("value", Tick{0});
                t.h = b.value("h", Height{0});
                t.time = rec.time;
                t.rec = rec.id;
                f.timers.push_back(std::move(t));
                break;
            }
            case TraceRecord::Kind::State: {
                std::string what = b.value("what", "");
                if (what == "round_entry") {
                    EntryRec e;
                    e.p = rec.process;
                    e.h = b.at("h").get<Height>();
                    e.r = b.at("r").get<Round>();
                    e.locked = valueFromJson(b.at("locked"));
                    e.llr = b.at("llr").get<Round>();
                    if (!b.at("polcr").is_null()) e.polcr = b.at("polcr").get<Round>();
                    e.time = rec.time;
                    e.rec = rec.id;
                    f.entries.push_back(std::move(e));
                } else if (what == "height_entry") {
                    Height h = b.at("h").get<Height>();
                    f.validatorSets[h][rec.process] =
                        b.at("validators").get<std::vector<ProcessId>>();
                }
                break;
            }
            case TraceRecord::Kind::Lock: {
                LockRec l;
                l.p = rec.process;
                l.h = b.at("h").get<Height>();
                l.r = b.at("r").get<Round>();
                l.to = valueFromJson(b.at("to"));
                l.llr = b.at("llr").get<Round>();
                l.reason = b.value("reason", "");
                l.time = rec.time;
                l.rec = rec.id;
                f.locks.push_back(std::move(l));
                break;
            }
            case TraceRecord::Kind::Decide: {
                DecideRec d;
                d.p = rec.process;
                d.h = b.at("h").get<Height>();
                d.r = b.value("r", Round{0});
                d.v = valueFromJson(b.at("v"));
                d.time = rec.time;
                d.rec = rec.id;
                d.output = b.value("scope", "") == "output";
                if (d.output) f.outputs[d.p].emplace_back(d.h, d.v);
                f.decides.push_back(std::move(d));
                break;
            }
            case TraceRecord::Kind::Reward: {
                std::string op = b.value("op", "");
                if (op == "grant") {
                    RewardGrant g;
                    g.rewardHeight = b.at("reward_h").get<Height>();
                    g.rewarded = b.at("set").get<std::vector<ProcessId>>();
                    f.ledger.registerGrant(
                        std::stoull(b.at("block").get<std::string>(), nullptr, 16),
                        std::move(g));
                } else if (op == "activate") {
                    f.ledger.activate(
                        std::stoull(b.at("block").get<std::string>(), nullptr, 16));
                }
                break;
            }
            case TraceRecord::Kind::Note: {
                std::string op = b.value("op", "");
                if (op == "block") {
                    Block blk;
                    blk.height = b.at("h").get<Height>();
                    blk.parentHash =
                        std::stoull(b.at("parent").get<std::string>(), nullptr, 16);
                    blk.payload = b.at("payload").get<std::vector<TxId>>();
                    blk.lastCommit = b.at("last_commit").get<std::vector<ProcessId>>();
                    f.blocks[hashBlock(blk)] = std::move(blk);
                } else if (op == "symbol") {
                    f.symbols[b.at("name").get<std::string>()] =
                        std::stoull(b.at("digest").get<std::string>(), nullptr, 16);
                }
                break;
            }
            default: break;
        }
    }
    return f;
}

namespace {

std::string pname(ProcessId p) { return "p" + std::to_string(p + 1); }

std::vector<ProcessId> correctValidators(const RunFacts& f, Height h) {
    std::vector<ProcessId> out;
    for (ProcessId v : f.validatorsAt(h))
        if (!f.cfg.isByzantine(v)) out.push_back(v);
    return out;
}

Verdict checkIntegrity(const RunFacts& f) {
    Verdict v{"OneShotIntegrity", "OK", "", {}};
    std::map<std::pair<ProcessId, Height>, int> count;
    for (const auto& d : f.decides) {
        if (d.output || f.cfg.isByzantine(d.p)) continue;
        if (++count[{d.p, d.h}] > 1) {
            v.status = "VIOLATED";
            v.detail = pname(d.p) + " decided twice at height " + std::to_string(d.h);
            v.witnesses.push_back(d.rec);
        }
    }
    return v;
}

Verdict checkOneShotValidity(const RunFacts& f) {
    Verdict v{"OneShotValidity", "OK", "", {}};
    Digest genesis = hashBlock(makeGenesis());
    for (const auto& d : f.decides) {
        if (f.cfg.isByzantine(d.p)) continue;
        if (!d.v.isBlock()) {
            v.status = "VIOLATED";
            v.detail = "non-block value decided";
            v.witnesses.push_back(d.rec);
            continue;
        }
        auto it = f.blocks.find(d.v.digest());
        if (it == f.blocks.end()) {
            v.status = "VIOLATED";
            v.detail = "decided block unknown to the run";
            v.witnesses.push_back(d.rec);
            continue;
        }
        const Block& b = it->second;
        bool ok = b.height == d.h && b.payload.size() <= kMaxPayload;
        for (TxId tx : b.payload) ok = ok && tx != 0;
        if (d.h == 1 && b.parentHash != genesis) ok = false;
        if (!ok) {
            v.status = "VIOLATED";
            v.detail = "decided block fails validity";
            v.witnesses.push_back(d.rec);
        }
    }
    return v;
}

Verdict checkOneShotAgreement(const RunFacts& f) {
    Verdict v{"OneShotAgreement", "OK", "", {}};
    std::map<Height, std::pair<Value, uint64_t>> first;
    for (const auto& d : f.decides) {
        if (d.output || f.cfg.isByzantine(d.p)) continue;
        auto [it, fresh] = first.try_emplace(d.h, d.v, d.rec);
        if (!fresh && !(it->second.first == d.v)) {
            v.status = "VIOLATED";
            v.detail = "two correct processes decided different values at height " +
                       std::to_string(d.h);
            v.witnesses.push_back(it->second.second);
            v.witnesses.push_back(d.rec);
        }
    }
    return v;
}

Verdict checkRepeatedAgreement(const RunFacts& f) {
    Verdict v{"RepeatedAgreement", "OK", "", {}};
    if (f.cfg.mode != RunMode::Repeated) {
        v.status = "N/A";
        return v;
    }
    std::map<Height, Value> canon;
    for (const auto& [p, outs] : f.outputs) {
        if (f.cfg.isByzantine(p)) continue;
        for (const auto& [h, val] : outs) {
            auto [it, fresh] = canon.try_emplace(h, val);
            if (!fresh && !(it->second == val)) {
                v.status = "VIOLATED";
                v.detail = "outputs diverge at height " + std::to_string(h);
            }
        }
    }
    return v;
}

Verdict checkRepeatedValidity(const RunFacts& f) {
    Verdict v{"RepeatedValidity", "OK", "", {}};
    if (f.cfg.mode != RunMode::Repeated) {
        v.status = "N/A";
        return v;
    }
    Digest genesis = hashBlock(makeGenesis());
    for (const auto& [p, outs] : f.outputs) {
        if (f.cfg.isByzantine(p)) continue;
        Digest prev = genesis;
        Height expect = 1;
        for (const auto& [h, val] : outs) {
            auto it = val.isBlock() ? f.blocks.find(val.digest()) : f.blocks.end();
            if (h != expect || it == f.blocks.end() || it->second.height != h ||
                it->second.parentHash != prev) {
                v.status = "VIOLATED";
                v.detail = pname(p) + " chain broken at height " + std::to_string(h);
                break;
            }
            const Block& b = it->second;
            for (TxId tx : b.payload)
                if (tx == 0) v.status = "VIOLATED";
            if (h >= 2) {
                auto vset = f.validatorsAt(h - 1);
                for (ProcessId s : b.lastCommit)
                    if (std::find(vset.begin(), vset.end(), s) == vset.end()) {
                        v.status = "VIOLATED";
                        v.detail = "lastCommit outside validator set";
                    }
            }
            prev = val.digest();
            ++expect;
        }
    }
    return v;
}

Verdict checkTermination(const RunFacts& f) {
    Verdict v{"TerminationBounded", "PASS", "", {}};
    if (f.cfg.mode == RunMode::OneShot) {
        for (ProcessId p : correctValidators(f, 1)) {
            bool decided = false;
            for (const auto& d : f.decides)
                if (!d.output && d.p == p) {
                    decided = true;
                    v.witnesses.push_back(d.rec);
                }
            if (!decided) {
                v.status = "FAIL";
                v.detail = pname(p) + " never decided";
            }
        }
        return v;
    }
    for (ProcessId p : f.cfg.correct()) {
        auto it = f.outputs.find(p);
        Height len = it == f.outputs.end() ? 0 : static_cast<Height>(it->second.size());
        if (len < f.cfg.horizonHeights) {
            v.status = "FAIL";
            v.detail = pname(p) + " produced " + std::to_string(len) + " of " +
                       std::to_string(f.cfg.horizonHeights) + " outputs";
        }
    }
    return v;
}

Verdict checkLockMonotonicity(const RunFacts& f) {
    Verdict v{"LockMonotonicity", "OK", "", {}};
    // Group prevote-quorum locks per height.
    std::map<Height, std::vector<const RunFacts::LockRec*>> byHeight;
    for (const auto& l : f.locks)
        if (l.reason == "prevote_quorum" && !f.cfg.isByzantine(l.p))
            byHeight[l.h].push_back(&l);
    int n = f.cfg.n;
    for (auto& [h, ls] : byHeight) {
        std::map<std::pair<Round, Digest>, std::set<ProcessId>> who;
        for (const auto* l : ls) who[{l->r, l->to.digest()}].insert(l->p);
        for (const auto& [key, procs] : who) {
            if (static_cast<int>(procs.size()) < oneThird(n)) continue;
            auto [r, d] = key;
            for (const auto* l : ls) {
                if (l->r > r && l->to.digest() != d) {
                    v.status = "VIOLATED";
                    v.detail = "lock on a different block after a one-third lock at round " +
                               std::to_string(r);
                    v.witnesses.push_back(l->rec);
                }
            }
        }
    }
    return v;
}

Verdict checkLockEdges(const RunFacts& f) {
    Verdict v{"LockEdges", "OK", "", {}};
    for (const auto& l : f.locks) {
        if (f.cfg.isByzantine(l.p)) continue;
        bool ok = (l.reason == "prevote_quorum" && l.to.isBlock()) ||
                  (l.reason == "nil_quorum" && l.to.isNil()) ||
                  (l.reason == "proposal_unlock" && l.to.isNil());
        if (!ok) {
            v.status = "VIOLATED";
            v.detail = "lock transition outside the allowed edges";
            v.witnesses.push_back(l.rec);
        }
    }
    return v;
}

Verdict checkTimeoutMonotonicity(const RunFacts& f) {
    Verdict v{"TimeoutMonotonicity", "OK", "", {}};
    std::map<std::pair<ProcessId, std::string>, Tick> last;
    for (const auto& t : f.timers) {
        if (t.op != "set" && t.op != "bump") continue;
        if (t.value == 0) continue;
        auto key = std::make_pair(t.p, t.kind);
        auto it = last.find(key);
        if (it != last.end() && t.value < it->second) {
            v.status = "VIOLATED";
            v.detail = "timeout decreased for " + t.kind + " at " + pname(t.p);
            v.witnesses.push_back(t.rec);
        }
        last[key] = std::max(it == last.end() ? 0 : it->second, t.value);
    }
    return v;
}

Verdict checkPolcrProvenance(const RunFacts& f) {
    Verdict v{"PolcrProvenance", "OK", "", {}};
    // polcr at a round entry must be absent, adopted from some proposal this
    // process delivered or emitted earlier, or equal to one of its own lock
    // rounds (the proposer path snapshots llr).
    std::map<uint64_t, const RunFacts::EmitRec*> byEmission;
    for (const auto& e : f.emits) byEmission[e.emission] = &e;
    std::map<ProcessId, std::set<Round>> allowed;
    struct Ev {
        Tick time;
        uint64_t rec;
        ProcessId p;
        Round val;
        bool isEntryCheck;
        std::optional<Round> polcr;
    };
    std::vector<Ev> evs;
    for (const auto& d : f.delivers) {
        auto it = byEmission.find(d.emission);
        if (it == byEmission.end()) continue;
        const auto& m = it->second->msg;
        if (m.kind == MsgKind::Propose && m.polcRound)
            evs.push_back({d.time, d.rec, d.p, *m.polcRound, false, {}});
    }
    for (const auto& e : f.emits)
        if (!e.relay && e.msg.kind == MsgKind::Propose && e.msg.polcRound)
            evs.push_back({e.time, e.rec, e.emitter, *e.msg.polcRound, false, {}});
    for (const auto& l : f.locks)
        if (l.reason == "prevote_quorum")
            evs.push_back({l.time, l.rec, l.p, l.r, false, {}});
    for (const auto& en : f.entries)
        evs.push_back({en.time, en.rec, en.p, 0, true, en.polcr});
    std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.rec < b.rec;
    });
    for (const auto& e : evs) {
        if (f.cfg.isByzantine(e.p)) continue;
        if (!e.isEntryCheck) {
            allowed[e.p].insert(e.val);
            continue;
        }
        if (e.polcr && !allowed[e.p].count(*e.polcr)) {
            v.status = "VIOLATED";
            v.detail = "polcr at round entry has no provenance";
            v.witnesses.push_back(e.rec);
        }
    }
    return v;
}

// First arrival of each message content at each process. Later duplicates of
// the same content (relays) are dropped by the dedup layer, so the bounds are
// judged on contents, not individual emissions.
std::map<std::pair<Digest, ProcessId>, Tick> firstContentArrival(const RunFacts& f) {
    std::map<uint64_t, Digest> content;
    for (const auto& e : f.emits) content[e.emission] = e.msg.id();
    std::map<std::pair<Digest, ProcessId>, Tick> first;
    for (const auto& d : f.delivers) {
        auto c = content.find(d.emission);
        if (c == content.end()) continue;
        auto [it, fresh] = first.try_emplace({c->second, d.p}, d.time);
        if (!fresh) it->second = std::min(it->second, d.time);
    }
    return first;
}

Verdict checkPostGstBound(const RunFacts& f) {
    Verdict v{"PostGstBound", "OK", "", {}};
    Tick tau = f.cfg.effectiveTau();
    if (tau >= f.endTime) {
        v.status = "N/A";
        v.detail = "no post-GST emissions in this run";
        return v;
    }
    auto arrival = firstContentArrival(f);
    for (const auto& e : f.emits) {
        if (f.cfg.isByzantine(e.emitter)) continue;
        if (e.time < tau) continue;
        if (e.time + f.cfg.delta >= f.endTime) continue;  // cut by the horizon
        Digest c = e.msg.id();
        for (ProcessId r = 0; r < f.cfg.rosterSize; ++r) {
            if (r == e.emitter || f.cfg.isByzantine(r)) continue;
            auto it = arrival.find({c, r});
            if (it == arrival.end() || it->second > e.time + f.cfg.delta) {
                v.status = "VIOLATED";
                v.detail = "correct-to-correct delivery missed the post-GST bound";
                v.witnesses.push_back(e.rec);
            }
        }
    }
    return v;
}

Verdict checkEventualDelivery(const RunFacts& f) {
    Verdict v{"EventualDelivery", "OK", "", {}};
    if (f.cfg.adversary.kind != "none" && f.cfg.adversary.kind != "random") {
        v.status = "N/A";
        v.detail = "scripted schedules choose their own finite delays";
        return v;
    }
    Tick bound = std::max(f.cfg.maxPreGstDelay, f.cfg.delta);
    auto arrival = firstContentArrival(f);
    for (const auto& e : f.emits) {
        if (f.cfg.isByzantine(e.emitter)) continue;
        if (e.time + bound >= f.endTime) continue;
        Digest c = e.msg.id();
        for (ProcessId r = 0; r < f.cfg.rosterSize; ++r) {
            if (r == e.emitter || f.cfg.isByzantine(r)) continue;
            if (!arrival.count({c, r})) {
                v.status = "VIOLATED";
                v.detail = "correct-to-correct message never delivered";
                v.witnesses.push_back(e.rec);
            }
        }
    }
    return v;
}

Verdict checkNoForgery(const RunFacts& f) {
    Verdict v{"NoForgery", "OK", "", {}};
    std::set<Digest> origins;
    for (const auto& e : f.emits) {
        Digest id = e.msg.id();
        if (!e.relay) {
            if (e.msg.signer != e.emitter) {
                v.status = "VIOLATED";
                v.detail = "origin emission with foreign signer";
                v.witnesses.push_back(e.rec);
            }
            origins.insert(id);
        } else if (!origins.count(id)) {
            v.status = "VIOLATED";
            v.detail = "relay of a never-emitted message";
            v.witnesses.push_back(e.rec);
        }
    }
    return v;
}

// Correct processes vote once per slot and propose once per round, so every
// piece of equivocation evidence must implicate a Byzantine signer; dropped
// duplicates must reference real emissions.
Verdict checkEvidenceScope(const RunFacts& f) {
    Verdict v{"EvidenceScope", "OK", "", {}};
    for (const auto& [rec, msg] : f.equivocationEvidence) {
        if (!f.cfg.isByzantine(msg.signer)) {
            v.status = "VIOLATED";
            v.detail = "a correct process equivocated";
            v.witnesses.push_back(rec);
        }
    }
    for (const auto& [rec, emission] : f.drops) {
        if (emission >= f.emits.size()) {
            v.status = "VIOLATED";
            v.detail = "drop without a matching emission";
            v.witnesses.push_back(rec);
        }
    }
    return v;
}

Verdict checkSelectorDeterminism(const RunFacts& f) {
    Verdict v{"SelectorDeterminism", "OK", "", {}};
    if (f.cfg.mode != RunMode::Repeated) {
        v.status = "N/A";
        return v;
    }
    for (const auto& [h, perProc] : f.validatorSets) {
        const std::vector<ProcessId>* first = nullptr;
        for (const auto& [p, vs] : perProc) {
            if (f.cfg.isByzantine(p)) continue;
            if (!first) first = &vs;
            else if (*first != vs) {
                v.status = "VIOLATED";
                v.detail = "validator sets diverge at height " + std::to_string(h);
            }
        }
    }
    return v;
}

Verdict checkFairness(const RunFacts& f) {
    Verdict v{"FairnessAudit", "NO-DATA", "", {}};
    if (f.cfg.mode != RunMode::Repeated) {
        v.status = "N/A";
        return v;
    }
    Height last = 0;
    for (const auto& [p, outs] : f.outputs)
        for (const auto& [h, _] : outs) last = std::max(last, h);
    std::map<Height, std::vector<ProcessId>> vsets;
    for (const auto& [h, _] : f.validatorSets) vsets[h] = f.validatorsAt(h);
    AuditReport rep =
        auditFairness(f.cfg, f.ledger, vsets, last, f.cfg.tailWindow);
    if (rep.verdict == FairnessVerdict::EventuallyFair)
        v.status = std::string(fairnessVerdictName(rep.verdict)) + "(" +
                   std::to_string(rep.hStar) + ")";
    else
        v.status = fairnessVerdictName(rep.verdict);
    v.detail = rep.toJson().dump();
    return v;
}

}  // namespace

TMonitorResult assumptionTMonitor(const RunFacts& facts, Round fromRound) {
    TMonitorResult res;
    Tick tau = facts.cfg.effectiveTau();
    int n = facts.cfg.n;
    int f = facts.cfg.f;
    // Group round entries per height.
    std::map<Height, std::map<Round, std::map<ProcessId, const RunFacts::EntryRec*>>> g;
    for (const auto& e : facts.entries)
        if (!facts.cfg.isByzantine(e.p)) g[e.h][e.r][e.p] = &e;
    // Rounds after the first one-shot decision are not monitored: the height
    // is already terminating.
    std::map<Height, Tick> firstDecide;
    for (const auto& d : facts.decides)
        if (!d.output) {
            auto [it, fresh] = firstDecide.try_emplace(d.h, d.time);
            if (!fresh) it->second = std::min(it->second, d.time);
        }
    bool firstHeightFilled = false;
    for (auto& [h, rounds] : g) {
        auto correct = correctValidators(facts, h);
        auto vset = facts.validatorsAt(h);
        for (auto& [r, entries] : rounds) {
            if (r < fromRound) continue;
            bool all = true;
            Tick minT = kTickMax, maxT = 0;
            for (ProcessId p : correct) {
                auto it = entries.find(p);
                if (it == entries.end()) {
                    all = false;
                    break;
                }
                minT = std::min(minT, it->second->time);
                maxT = std::max(maxT, it->second->time);
            }
            if (!all) continue;
            if (minT < tau) continue;  // not yet a post-GST round
            auto fd = firstDecide.find(h);
            if (fd != firstDecide.end() && fd->second <= minT) continue;
            ProcessId proposer = proposerAt(vset, h, r, facts.cfg.proposerOffset);
            bool proposerCorrect = !facts.cfg.isByzantine(proposer);
            bool sat = false;
            if (proposerCorrect && entries.count(proposer)) {
                Round llrK = entries[proposer]->llr;
                int count = 0;
                for (ProcessId p : correct) {
                    const auto* e = entries[p];
                    bool locked = !e->locked.isNil() && !e->locked.isBottom();
                    if (locked && e->llr >= llrK) ++count;
                }
                sat = 3 * count < n - 3 * f;  // count < n/3 - f, exact
            }
            if (!firstHeightFilled) res.perRound.emplace_back(r, sat);
            if (sat && !res.satisfied) {
                res.satisfied = true;
                res.height = h;
                res.round = r;
                if (entries.count(proposer))
                    res.witness = entries[proposer]->rec;
            }
        }
        firstHeightFilled = true;
    }
    return res;
}

bool assumptionTHolds(const RunFacts& facts, Round fromRound) {
    return assumptionTMonitor(facts, fromRound).satisfied;
}

Verdict checkGoldenStates(const RunFacts& facts, const Json& goldens) {
    Verdict v{"GoldenStates", "PASS", "", {}};
    auto resolve = [&](const Json& j) -> Value {
        std::string s = j.get<std::string>();
        if (s == "nil") return Value::nil();
        if (s == "_") return Value::bottom();
        auto it = facts.symbols.find(s);
        if (it == facts.symbols.end()) return Value::block(0);
        return Value::block(it->second);
    };
    std::ostringstream fails;
    for (const Json& g : goldens) {
        ProcessId p = g.at("p").get<ProcessId>();
        if (g.contains("decided")) {
            Value want = resolve(g.at("decided"));
            bool found = false;
            for (const auto& d : facts.decides)
                if (!d.output && d.p == p && d.v == want) found = true;
            if (!found) {
                v.status = "FAIL";
                fails << pname(p) << " did not decide " << g.at("decided").get<std::string>()
                      << "; ";
            }
            continue;
        }
        if (g.contains("not_decided") && g.at("not_decided").get<bool>()) {
            for (const auto& d : facts.decides)
                if (!d.output && d.p == p) {
                    v.status = "FAIL";
                    fails << pname(p) << " unexpectedly decided; ";
                }
            continue;
        }
        if (g.contains("last_lock")) {
            Value want = resolve(g.at("last_lock"));
            const RunFacts::LockRec* last = nullptr;
            for (const auto& l : facts.locks)
                if (l.p == p) last = &l;
            if (!last || !(last->to == want)) {
                v.status = "FAIL";
                fails << pname(p) << " last lock is "
                      << (last ? last->to.str() : "none") << "; ";
            }
            continue;
        }
        Round endOf = g.at("end_of_round").get<Round>();
        // End-of-round state = snapshot at entry to the next round.
        const RunFacts::EntryRec* entry = nullptr;
        for (const auto& e : facts.entries)
            if (e.p == p && e.r == endOf + 1) entry = &e;
        if (!entry) {
            v.status = "FAIL";
            fails << pname(p) << " never reached round " << (endOf + 1) << "; ";
            continue;
        }
        bool ok = true;
        if (g.contains("locked")) ok = ok && entry->locked == resolve(g.at("locked"));
        if (g.contains("llr")) ok = ok && entry->llr == g.at("llr").get<Round>();
        if (g.contains("polcr")) {
            if (g.at("polcr").is_null()) ok = ok && !entry->polcr;
            else ok = ok && entry->polcr && *entry->polcr == g.at("polcr").get<Round>();
        }
        if (!ok) {
            v.status = "FAIL";
            fails << pname(p) << " end of round " << endOf << ": locked="
                  << entry->locked.str() << " llr=" << entry->llr << " polcr="
                  << (entry->polcr ? std::to_string(*entry->polcr) : "_") << "; ";
            v.witnesses.push_back(entry->rec);
        }
    }
    v.detail = fails.str();
    return v;
}

std::vector<Verdict> checkProperties(const RunFacts& f) {
    std::vector<Verdict> out;
    out.push_back(checkIntegrity(f));
    out.push_back(checkOneShotValidity(f));
    out.push_back(checkOneShotAgreement(f));
    out.push_back(checkRepeatedAgreement(f));
    out.push_back(checkRepeatedValidity(f));
    out.push_back(checkTermination(f));
    out.push_back(checkLockMonotonicity(f));
    out.push_back(checkLockEdges(f));
    out.push_back(checkTimeoutMonotonicity(f));
    out.push_back(checkPolcrProvenance(f));
    out.push_back(checkPostGstBound(f));
    out.push_back(checkEventualDelivery(f));
    out.push_back(checkNoForgery(f));
    out.push_back(checkSelectorDeterminism(f));
    out.push_back(checkEvidenceScope(f));
    out.push_back(checkFairness(f));
    TMonitorResult t = assumptionTMonitor(f, 1);
    Verdict tv{"AssumptionT", "absent", "", {}};
    if (t.satisfied) {
        tv.status = "satisfied(h=" + std::to_string(t.height) +
                    ",r=" + std::to_string(t.round) + ")";
        tv.witnesses.push_back(t.witness);
    }
    out.push_back(tv);
    return out;
}

}  // namespace tmbft
