#pragma once

#include <span>
#include <stdexcept>

#include "tmbft/votes.hpp"

namespace tmbft {

// Decision/locking threshold: strictly more than 2n/3 distinct signers.
constexpr int quorum(int n) { return (2 * n) / 3 + 1; }

// Commit-adoption threshold: strictly more than n/3 distinct signers, so at
// least one signer is correct when f < n/3.
constexpr int oneThird(int n) { return n / 3 + 1; }

inline bool is23Maj(const Value& v, const VoteSet& votes, int n) {
    return votes.countFor(v) >= static_cast<size_t>(quorum(n));
}

inline bool anyTwoThirds(const VoteSet& votes, int n) {
    return votes.distinctSigners() >= static_cast<size_t>(quorum(n));
}

// Raw-message variants with the slot precondition enforced: every message
// must share (height, round, kind). Distinct-signer counting, first message
// per signer retained.
bool is23Maj(const Value& v, std::span<const ConsensusMessage> votes, int n);
bool atLeastOneThird(const Value& b, std::span<const ConsensusMessage> commits, int n);

inline bool atLeastOneThird(const Value& b, const VoteSet& commits, int n) {
    return commits.countFor(b) >= static_cast<size_t>(oneThird(n));
}

}  // namespace tmbft
