#include <cstdio>

#include "tmbft/block.hpp"
#include "tmbft/message.hpp"
#include "tmbft/quorum.hpp"

namespace tmbft {

std::string hexDigest(Digest d) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

Digest hashBlock(const Block& b) {
    Fnv1a h;
    h.put(std::string("blk"));
    h.put(b.height);
    h.put(b.parentHash);
    h.put(b.payload);
    std::vector<uint64_t> signers(b.lastCommit.begin(), b.lastCommit.end());
    h.put(signers);
    return h.digest();
}

Digest Block::hash() const { return hashBlock(*this); }

Block makeGenesis() {
    Block g;
    g.height = 0;
    g.parentHash = 0;
    return g;
}

BlockStore::BlockStore() { genesis_ = add(makeGenesis()); }

Digest BlockStore::add(Block b) {
    Digest d = hashBlock(b);
    blocks_.try_emplace(d, std::move(b));
    return d;
}

const Block* BlockStore::get(Digest d) const {
    auto it = blocks_.find(d);
    return it == blocks_.end() ? nullptr : &it->second;
}

bool isValid(const Value& v, const ChainView& chain, const BlockStore& store) {
    if (!v.isBlock()) return false;
    const Block* b = store.get(v.digest());
    if (!b) return false;
    if (b->height != chain.tipHeight + 1) return false;
    if (b->parentHash != chain.tipDigest) return false;
    if (b->payload.size() > kMaxPayload) return false;
    for (TxId tx : b->payload)
        if (tx == 0) return false;  // 0 is not a well-formed transaction id
    return true;
}

std::vector<TxId> MempoolStub::draw(Height h, Round r, ProcessId proposer) const {
    Fnv1a f;
    f.put(std::string("mempool"));
    f.put(seed_);
    f.put(h);
    f.put(r);
    f.put(proposer);
    uint64_t x = f.digest();
    std::vector<TxId> txs;
    size_t count = 1 + (x % 4);
    for (size_t i = 0; i < count; ++i) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        txs.push_back(x | 1);  // keep ids nonzero
    }
    return txs;
}

const char* msgKindName(MsgKind k) {
    switch (k) {
        case MsgKind::Propose: return "PROPOSE";
        case MsgKind::Prevote: return "PREVOTE";
        case MsgKind::Precommit: return "PRECOMMIT";
        case MsgKind::Commit: return "COMMIT";
    }
    return "?";
}

Digest ConsensusMessage::id() const {
    Fnv1a h;
    h.put(std::string("msg"));
    h.put(static_cast<int32_t>(kind));
    h.put(signer);
    h.put(height);
    h.put(round);
    h.put(static_cast<int32_t>(value.kind()));
    h.put(value.digest());
    h.put(polcRound ? *polcRound : static_cast<Round>(-2));
    h.put(llr);
    std::vector<uint64_t> att(attestation.begin(), attestation.end());
    h.put(att);
    return h.digest();
}

std::string ConsensusMessage::str() const {
    std::string s = msgKindName(kind);
    s += "(p" + std::to_string(signer + 1) + ",H" + std::to_string(height);
    if (kind != MsgKind::Commit) s += ",r" + std::to_string(round);
    s += "," + value.str();
    if (kind == MsgKind::Propose)
        s += ",polcr=" + (polcRound ? std::to_string(*polcRound) : std::string("_"));
    s += ")";
    return s;
}

ConsensusMessage makePropose(ProcessId signer, Height h, Round r, Value v,
                             std::optional<Round> polcr) {
    ConsensusMessage m;
    m.kind = MsgKind::Propose;
    m.signer = signer;
    m.height = h;
    m.round = r;
    m.value = v;
    m.polcRound = polcr;
    return m;
}

ConsensusMessage makePrevote(ProcessId signer, Height h, Round r, Value v, Round llr) {
    ConsensusMessage m;
    m.kind = MsgKind::Prevote;
    m.signer = signer;
    m.height = h;
    m.round = r;
    m.value = v;
    m.llr = llr;
    return m;
}

ConsensusMessage makePrecommit(ProcessId signer, Height h, Round r, Value v) {
    ConsensusMessage m;
    m.kind = MsgKind::Precommit;
    m.signer = signer;
    m.height = h;
    m.round = r;
    m.value = v;
    return m;
}

ConsensusMessage makeCommit(ProcessId signer, Height h, Value v,
                            std::vector<ProcessId> attestation) {
    ConsensusMessage m;
    m.kind = MsgKind::Commit;
    m.signer = signer;
    m.height = h;
    m.round = 0;
    m.value = v;
    std::sort(attestation.begin(), attestation.end());
    attestation.erase(std::unique(attestation.begin(), attestation.end()),
                      attestation.end());
    m.attestation = std::move(attestation);
    return m;
}

namespace {

VoteSet collectSlot(std::span<const ConsensusMessage> votes) {
    VoteSet set;
    for (size_t i = 1; i < votes.size(); ++i) {
        if (votes[i].height != votes[0].height || votes[i].round != votes[0].round ||
            votes[i].kind != votes[0].kind)
            throw std::invalid_argument("mixed (H,r,kind) in vote set");
    }
    for (const auto& m : votes) set.insert(m);
    return set;
}

}  // namespace

bool is23Maj(const Value& v, std::span<const ConsensusMessage> votes, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (votes.empty()) return false;
    return is23Maj(v, collectSlot(votes), n);
}

bool atLeastOneThird(const Value& b, std::span<const ConsensusMessage> commits, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (commits.empty()) return false;
    for (const auto& m : commits)
        if (m.kind != MsgKind::Commit || m.height != commits[0].height)
            throw std::invalid_argument("commits must share height");
    VoteSet set;
    for (const auto& m : commits) set.insert(m);
    return atLeastOneThird(b, set, n);
}

}  // namespace tmbft
