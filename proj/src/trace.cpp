#include "tmbft/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tmbft {

const char* traceKindName(TraceRecord::Kind k) {
    switch (k) {
        case TraceRecord::Kind::Meta: return "meta";
        case TraceRecord::Kind::Emit: return "emit";
        case TraceRecord::Kind::Deliver: return "deliver";
        case TraceRecord::Kind::Drop: return "drop";
        case TraceRecord::Kind::Timer: return "timer";
        case TraceRecord::Kind::State: return "state";
        case TraceRecord::Kind::Lock: return "lock";
        case TraceRecord::Kind::Decide: return "decide";
        case TraceRecord::Kind::Reward: return "reward";
        case TraceRecord::Kind::Evidence: return "evidence";
        case TraceRecord::Kind::Audit: return "audit";
        case TraceRecord::Kind::Note: return "note";
    }
    return "?";
}

namespace {

TraceRecord::Kind kindFromName(const std::string& s) {
    using K = TraceRecord::Kind;
    for (K k : {K::Meta, K::Emit, K::Deliver, K::Drop, K::Timer, K::State, K::Lock,
                K::Decide, K::Reward, K::Evidence, K::Audit, K::Note})
        if (s == traceKindName(k)) return k;
    throw std::invalid_argument("unknown trace record kind: " + s);
}

}  // namespace

Json valueToJson(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Bottom: return Json("_");
        case Value::Kind::Nil: return Json("nil");
        case Value::Kind::Block: return Json(hexDigest(v.digest()));
    }
    return Json();
}

Value valueFromJson(const Json& j) {
    std::string s = j.get<std::string>();
    if (s == "_") return Value::bottom();
    if (s == "nil") return Value::nil();
    return Value::block(std::stoull(s, nullptr, 16));
}

Json messageToJson(const ConsensusMessage& m) {
    Json j;
    j["kind"] = msgKindName(m.kind);
    j["signer"] = m.signer;
    j["h"] = m.height;
    j["r"] = m.round;
    j["v"] = valueToJson(m.value);
    if (m.kind == MsgKind::Propose)
        j["polcr"] = m.polcRound ? Json(*m.polcRound) : Json(nullptr);
    if (m.kind == MsgKind::Prevote) j["llr"] = m.llr;
    if (m.kind == MsgKind::Commit) j["att"] = m.attestation;
    return j;
}

ConsensusMessage messageFromJson(const Json& j) {
    ConsensusMessage m;
    std::string k = j.at("kind").get<std::string>();
    if (k == "PROPOSE") m.kind = MsgKind::Propose;
    else if (k == "PREVOTE") m.kind = MsgKind::Prevote;
    else if (k == "PRECOMMIT") m.kind = MsgKind::Precommit;
    else if (k == "COMMIT") m.kind = MsgKind::Commit;
    else throw std::invalid_argument("bad message kind: " + k);
    m.signer = j.at("signer").get<ProcessId>();
    m.height = j.at("h").get<Height>();
    m.round = j.at("r").get<Round>();
    m.value = valueFromJson(j.at("v"));
    if (j.contains("polcr") && !j.at("polcr").is_null())
        m.polcRound = j.at("polcr").get<Round>();
    if (j.contains("llr")) m.llr = j.at("llr").get<Round>();
    if (j.contains("att")) m.attestation = j.at("att").get<std::vector<ProcessId>>();
    return m;
}

uint64_t Trace::append(Tick t, ProcessId p, TraceRecord::Kind k, Json body) {
    TraceRecord rec;
    rec.id = records_.size();
    rec.time = t;
    rec.process = p;
    rec.kind = k;
    rec.body = std::move(body);
    records_.push_back(std::move(rec));
    return records_.back().id;
}

std::string Trace::toJsonl() const {
    std::ostringstream out;
    for (const auto& r : records_) {
        Json j;
        j["i"] = r.id;
        j["t"] = r.time;
        j["p"] = r.process;
        j["k"] = traceKindName(r.kind);
        j["b"] = r.body;
        out << j.dump() << "\n";
    }
    return out.str();
}

void Trace::writeJsonl(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file for writing: " + path);
    f << toJsonl();
}

Trace Trace::readJsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    Trace tr;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        TraceRecord rec;
        rec.id = j.at("i").get<uint64_t>();
        rec.time = j.at("t").get<Tick>();
        rec.process = j.at("p").get<ProcessId>();
        rec.kind = kindFromName(j.at("k").get<std::string>());
        rec.body = j.at("b");
        tr.records_.push_back(std::move(rec));
    }
    return tr;
}

}  // namespace tmbft
