#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tmbft/block.hpp"
#include "tmbft/quorum.hpp"
#include "tmbft/votes.hpp"

using namespace tmbft;

namespace {

ConsensusMessage pv(ProcessId s, Round r, Value v) { return makePrevote(s, 1, r, v, -1); }

// Exhaustive subset enumeration for the quorum-intersection oracle.
void forEachSubset(int n, int size, const std::function<void(uint32_t)>& fn) {
    for (uint32_t mask = 0; mask < (1u << n); ++mask)
        if (__builtin_popcount(mask) == size) fn(mask);
}

}  // namespace

TEST_CASE("quorum thresholds") {
    CHECK(quorum(4) == 3);
    CHECK(quorum(7) == 5);
    CHECK(quorum(10) == 7);
    CHECK(oneThird(4) == 2);
    CHECK(oneThird(7) == 3);
}

TEST_CASE("quorum intersection: any two quorums share more than f signers") {
    for (int n : {4, 7}) {
        int q = quorum(n);
        int f = (n - 1) / 3;
        forEachSubset(n, q, [&](uint32_t a) {
            forEachSubset(n, q, [&](uint32_t b) {
                int inter = __builtin_popcount(a & b);
                CHECK(inter >= oneThird(n));
                CHECK(inter > f);
            });
        });
    }
    // n = 10 sampled.
    std::mt19937_64 rng(5);
    int n = 10, q = quorum(n);
    for (int iter = 0; iter < 2000; ++iter) {
        uint32_t a = 0, b = 0;
        while (__builtin_popcount(a) < q) a |= 1u << (rng() % n);
        while (__builtin_popcount(b) < q) b |= 1u << (rng() % n);
        CHECK(__builtin_popcount(a & b) >= oneThird(n));
    }
}

TEST_CASE("is23Maj counts distinct signers") {
    Value b = Value::block(0xb10c);
    SUBCASE("three of four suffice") {
        std::vector<ConsensusMessage> votes = {pv(0, 1, b), pv(1, 1, b), pv(2, 1, b)};
        CHECK(is23Maj(b, votes, 4));
    }
    SUBCASE("empty set never reaches quorum") {
        std::vector<ConsensusMessage> votes;
        CHECK_FALSE(is23Maj(b, votes, 4));
    }
    SUBCASE("duplicates from one signer count once") {
        std::vector<ConsensusMessage> votes = {pv(0, 1, b), pv(0, 1, b), pv(1, 1, b)};
        CHECK_FALSE(is23Maj(b, votes, 4));
    }
    SUBCASE("mixed slots are rejected") {
        std::vector<ConsensusMessage> votes = {pv(0, 1, b), pv(1, 2, b)};
        CHECK_THROWS_AS(is23Maj(b, votes, 4), std::invalid_argument);
    }
}

TEST_CASE("atLeastOneThird thresholds") {
    Value b = Value::block(0xb10c);
    auto cm = [&](ProcessId s) { return makeCommit(s, 3, b, {}); };
    std::vector<ConsensusMessage> two = {cm(0), cm(1)};
    CHECK(atLeastOneThird(b, two, 4));
    std::vector<ConsensusMessage> one = {cm(3)};
    CHECK_FALSE(atLeastOneThird(b, one, 4));
    std::vector<ConsensusMessage> three = {cm(0), cm(1), cm(2)};
    CHECK(atLeastOneThird(b, three, 7));
    std::vector<ConsensusMessage> twoOfSeven = {cm(0), cm(1)};
    CHECK_FALSE(atLeastOneThird(b, twoOfSeven, 7));
}

TEST_CASE("VoteSet retains the first message per signer") {
    VoteSet set;
    Value b = Value::block(1), c = Value::block(2);
    CHECK(set.insert(pv(0, 1, b)) == InsertResult::New);
    CHECK(set.insert(pv(0, 1, b)) == InsertResult::Duplicate);
    CHECK(set.insert(pv(0, 1, c)) == InsertResult::Equivocation);
    CHECK(set.distinctSigners() == 1);
    CHECK(set.countFor(b) == 1);
    CHECK(set.countFor(c) == 0);
}

TEST_CASE("VoteSet idempotence under shuffled replays and equivocations") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<ConsensusMessage> msgs;
        for (ProcessId s = 0; s < 7; ++s) {
            Value v = rng() % 2 ? Value::block(rng() % 3) : Value::nil();
            msgs.push_back(pv(s, 1, v));
        }
        VoteSet base;
        for (const auto& m : msgs) base.insert(m);
        // Replay with duplicates and later equivocations interleaved.
        std::vector<ConsensusMessage> noisy = msgs;
        for (ProcessId s = 0; s < 7; ++s) noisy.push_back(pv(s, 1, Value::block(77)));
        for (const auto& m : msgs) noisy.push_back(m);
        std::shuffle(noisy.begin() + static_cast<long>(msgs.size()), noisy.end(), rng);
        VoteSet replayed;
        for (const auto& m : msgs) replayed.insert(m);  // originals arrive first
        for (size_t i = msgs.size(); i < noisy.size(); ++i) replayed.insert(noisy[i]);
        CHECK(replayed.distinctSigners() == base.distinctSigners());
        for (Digest d = 0; d < 3; ++d)
            CHECK(replayed.countFor(Value::block(d)) == base.countFor(Value::block(d)));
        CHECK(replayed.countFor(Value::nil()) == base.countFor(Value::nil()));
    }
}

TEST_CASE("block hashing is content-addressed") {
    BlockStore store;
    Block a;
    a.height = 1;
    a.parentHash = store.genesisDigest();
    a.payload = {1, 2, 3};
    Block b = a;
    CHECK(hashBlock(a) == hashBlock(b));
    b.payload = {1, 2, 4};
    CHECK(hashBlock(a) != hashBlock(b));
    // Distinct digests across a generated corpus.
    std::set<Digest> seen;
    MempoolStub pool(123);
    for (Height h = 1; h <= 20; ++h)
        for (Round r = 1; r <= 5; ++r)
            for (ProcessId p = 0; p < 4; ++p) {
                Block blk;
                blk.height = h;
                blk.parentHash = store.genesisDigest();
                blk.payload = pool.draw(h, r, p);
                seen.insert(hashBlock(blk));
            }
    CHECK(seen.size() == 20u * 5u * 4u);
    // Genesis digest is stable.
    CHECK(hashBlock(makeGenesis()) == BlockStore().genesisDigest());
}

TEST_CASE("isValid rejects markers and broken linkage") {
    BlockStore store;
    ChainView genesis{store.genesisDigest(), 0};
    CHECK_FALSE(isValid(Value::bottom(), genesis, store));
    CHECK_FALSE(isValid(Value::nil(), genesis, store));
    Block good;
    good.height = 1;
    good.parentHash = store.genesisDigest();
    good.payload = {42};
    Digest d = store.add(good);
    CHECK(isValid(Value::block(d), genesis, store));
    Block bad = good;
    bad.parentHash = 0xdead;
    Digest db = store.add(bad);
    CHECK_FALSE(isValid(Value::block(db), genesis, store));
    Block wrongHeight = good;
    wrongHeight.height = 2;
    CHECK_FALSE(isValid(Value::block(store.add(wrongHeight)), genesis, store));
    // Unknown digest (a value nobody materialized) is never valid.
    CHECK_FALSE(isValid(Value::block(0x123456), genesis, store));
    // Validity is false on markers for deeper contexts too.
    ChainView deeper{d, 1};
    CHECK_FALSE(isValid(Value::nil(), deeper, store));
    CHECK_FALSE(isValid(Value::bottom(), deeper, store));
}

TEST_CASE("createNewBlock determinism: same inputs, same block") {
    MempoolStub pool(7);
    Block a, b;
    a.height = 2;
    b.height = 2;
    a.parentHash = b.parentHash = 0xabc;
    a.payload = pool.draw(2, 1, 0);
    b.payload = pool.draw(2, 1, 0);
    a.lastCommit = b.lastCommit = {0, 1, 2};
    CHECK(hashBlock(a) == hashBlock(b));
    // Different proposer or round yields a different payload.
    CHECK(pool.draw(2, 1, 0) != pool.draw(2, 1, 1));
    CHECK(pool.draw(2, 1, 0) != pool.draw(2, 2, 0));
}

TEST_CASE("block carries the previous signature set") {
    Block b;
    b.height = 2;
    b.lastCommit = {0, 1, 2};
    CHECK(b.lastCommit == std::vector<ProcessId>{0, 1, 2});
    CHECK(makeGenesis().lastCommit.empty());
    CHECK(makeGenesis().height == 0);
}
