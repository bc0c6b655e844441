#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmbft/basics.hpp"
#include "tmbft/value.hpp"

namespace tmbft {

enum class MsgKind : uint8_t { Propose, Prevote, Precommit, Commit };

const char* msgKindName(MsgKind k);

// One consensus wire message. PoLCR rides only on proposals; llr rides on
// prevotes (carried but never read by any rule); the attestation list rides
// on commits and names the validators the committer saw participate.
struct ConsensusMessage {
    MsgKind kind = MsgKind::Prevote;
    ProcessId signer = kNoProcess;
    Height height = 0;
    Round round = 0;  // unused for COMMIT
    Value value;
    std::optional<Round> polcRound;       // PROPOSE only
    Round llr = kNoRound;                 // PREVOTE only
    std::vector<ProcessId> attestation;   // COMMIT only, sorted

    Digest id() const;  // content identity, used for dedup and provenance

    friend bool operator==(const ConsensusMessage& a, const ConsensusMessage& b) {
        return a.id() == b.id();
    }
    std::string str() const;
};

ConsensusMessage makePropose(ProcessId signer, Height h, Round r, Value v,
                             std::optional<Round> polcr);
ConsensusMessage makePrevote(ProcessId signer, Height h, Round r, Value v, Round llr);
ConsensusMessage makePrecommit(ProcessId signer, Height h, Round r, Value v);
ConsensusMessage makeCommit(ProcessId signer, Height h, Value v,
                            std::vector<ProcessId> attestation);

}  // namespace tmbft
