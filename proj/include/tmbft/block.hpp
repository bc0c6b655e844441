#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "tmbft/basics.hpp"
#include "tmbft/value.hpp"

namespace tmbft {

using TxId = uint64_t;

// Header + payload + the signer set of the previous block's commits.
struct Block {
    Height height = 0;
    Digest parentHash = 0;
    std::vector<TxId> payload;
    std::vector<ProcessId> lastCommit;  // sorted, distinct

    Digest hash() const;
};

// Content-addressed hash over all block fields. Deterministic; identical
// blocks hash identically across runs.
Digest hashBlock(const Block& b);

// Run-wide registry of every block that appeared in any message. A value can
// reference a digest nobody registered (Byzantine invention); lookups then
// fail and the value is never valid.
class BlockStore {
public:
    BlockStore();

    Digest add(Block b);
    const Block* get(Digest d) const;
    Digest genesisDigest() const { return genesis_; }
    const Block& genesis() const { return *get(genesis_); }
    size_t size() const { return blocks_.size(); }

private:
    std::map<Digest, Block> blocks_;
    Digest genesis_ = 0;
};

// A chain prefix as seen by one process: digests of decided blocks, genesis
// first. Valid extension = height chains on and parent hash matches the tip.
struct ChainView {
    Digest tipDigest = 0;
    Height tipHeight = 0;
};

constexpr size_t kMaxPayload = 1 << 12;

// False for Nil and Bottom; a block must chain onto the given prefix and
// carry a well-formed payload.
bool isValid(const Value& v, const ChainView& chain, const BlockStore& store);

// Deterministic per-run transaction source. Payloads differ by position
// (height, round, proposer) so competing proposals differ in content.
class MempoolStub {
public:
    explicit MempoolStub(uint64_t seed) : seed_(seed) {}
    std::vector<TxId> draw(Height h, Round r, ProcessId proposer) const;

private:
    uint64_t seed_;
};

Block makeGenesis();

}  // namespace tmbft
