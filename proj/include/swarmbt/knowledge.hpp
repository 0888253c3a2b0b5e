#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swarmbt/condition_sequence.hpp"
#include "swarmbt/grammar.hpp"

namespace swarmbt {

/// Per-robot knowledge state: index-aligned lists of known condition
/// sequences and the action subtrees answering them. Sequences are unique;
/// merged knowledge is never removed.
struct KnowledgeBase {
    std::vector<ConditionSequence> known_sequences;
    std::vector<BtNode> known_actions;

    std::size_t size() const { return known_sequences.size(); }
};

bool knows(const KnowledgeBase& kb, const ConditionSequence& s_q);

/// Returns the action subtree aligned with s_q, or nullptr when unknown.
const BtNode* lookup(const KnowledgeBase& kb, const ConditionSequence& s_q);

enum class UpdateOutcome {
    Updated,       // merged into NK, appended to the knowledge lists
    AlreadyKnown,  // no-op; the sequence was present
    Rejected,      // action subtree failed validation; no state change
};

/// The update process: validates the action subtree, then (unless s_q is
/// already known) merges Sequence(s_q, action) into the control tree's NK
/// region and appends to the knowledge lists. Exactly one update-count
/// metrics event belongs to each Updated outcome; the caller records it with
/// the source tag it knows (Q/EU/EBU).
UpdateOutcome apply_update(KnowledgeBase& kb, ControlTree& control, const ConditionSequence& s_q,
                           const BtNode& action, const Registry& reg);

/// One eavesdropped response: the queried sequence, the answering subtree
/// and the remaining buffer lifetime in iterations.
struct EavesdropMessage {
    ConditionSequence sequence;
    BtNode action;
    std::int64_t timer = 0;
    std::int64_t source_iteration = 0;
};

/// Timed episodic store of eavesdropped messages. Entries are unique per
/// sequence; unused entries expire once their timer reaches zero.
class MessageBuffer {
public:
    MessageBuffer() = default;
    explicit MessageBuffer(std::optional<std::size_t> capacity) : capacity_(capacity) {}

    /// Adds m, refreshing the timer of an existing same-sequence entry
    /// instead of duplicating. When a capacity is set and exceeded, the entry
    /// with the smallest remaining timer is evicted.
    void add(EavesdropMessage m);

    /// End-of-iteration aging: decrements every timer, drops entries that
    /// reach zero, preserves the order of survivors.
    void tick();

    /// Removes and returns the first entry matching s_q, if any.
    std::optional<EavesdropMessage> take(const ConditionSequence& s_q);

    void clear() { messages_.clear(); }
    bool empty() const { return messages_.empty(); }
    std::size_t size() const { return messages_.size(); }
    const std::vector<EavesdropMessage>& messages() const { return messages_; }

private:
    std::vector<EavesdropMessage> messages_;
    std::optional<std::size_t> capacity_;
};

}  // namespace swarmbt
