#pragma once

#include <map>
#include <vector>

#include "tmbft/message.hpp"

namespace tmbft {

// Outcome of inserting a message into a VoteSet.
enum class InsertResult { New, Duplicate, Equivocation };

// Messages of one (height, round, kind) slot, keyed by signer. The first
// message per signer is retained; a later conflicting one from the same
// signer goes to the owner's evidence log and is never counted.
class VoteSet {
public:
    InsertResult insert(const ConsensusMessage& m) {
        auto [it, fresh] = retained_.try_emplace(m.signer, m);
        if (fresh) return InsertResult::New;
        return it->second == m ? InsertResult::Duplicate : InsertResult::Equivocation;
    }

    size_t distinctSigners() const { return retained_.size(); }

    size_t countFor(const Value& v) const {
        size_t c = 0;
        for (const auto& [_, m] : retained_)
            if (m.value == v) ++c;
        return c;
    }

    bool has(ProcessId signer) const { return retained_.count(signer) != 0; }

    const ConsensusMessage* get(ProcessId signer) const {
        auto it = retained_.find(signer);
        return it == retained_.end() ? nullptr : &it->second;
    }

    // Distinct block values present in the set, in deterministic order.
    std::vector<Value> blockValues() const {
        std::vector<Value> out;
        for (const auto& [_, m] : retained_)
            if (m.value.isBlock()) out.push_back(m.value);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    const std::map<ProcessId, ConsensusMessage>& retained() const { return retained_; }

private:
    std::map<ProcessId, ConsensusMessage> retained_;
};

}  // namespace tmbft
