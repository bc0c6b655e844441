#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace tmbft {

// Process index within a run's roster. Stable for the whole run.
using ProcessId = int32_t;
using Height = int32_t;
using Round = int32_t;

// Simulation time in integer ticks. Timeouts, delta and the "+1" timeout
// increments all share this unit.
using Tick = int64_t;

constexpr Tick kTickMax = std::numeric_limits<Tick>::max() / 4;
constexpr ProcessId kNoProcess = -1;

// Round value meaning "never locked".
constexpr Round kNoRound = -1;

// Content digest for blocks and messages. 64-bit FNV-1a is plenty for a
// simulation corpus; it stands in for a collision-resistant hash.
using Digest = uint64_t;

class Fnv1a {
public:
    void put(uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (i * 8)) & 0xff;
            h_ *= 0x100000001b3ull;
        }
    }
    void put(int64_t v) { put(static_cast<uint64_t>(v)); }
    void put(int32_t v) { put(static_cast<uint64_t>(static_cast<int64_t>(v))); }
    void put(const std::string& s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001b3ull;
        }
        put(static_cast<uint64_t>(s.size()));
    }
    template <typename T>
    void put(const std::vector<T>& xs) {
        for (const T& x : xs) put(x);
        put(static_cast<uint64_t>(xs.size()));
    }
    Digest digest() const { return h_; }

private:
    uint64_t h_ = 0xcbf29ce484222325ull;
};

std::string hexDigest(Digest d);

// Portable bounded draw: identical sequences for a given seed on every
// platform, unlike std::uniform_int_distribution.
template <typename Rng>
int64_t drawRange(Rng& rng, int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace tmbft
