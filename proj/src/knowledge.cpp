#include "swarmbt/knowledge.hpp"

#include <algorithm>

namespace swarmbt {

bool knows(const KnowledgeBase& kb, const ConditionSequence& s_q) {
    return std::find(kb.known_sequences.begin(), kb.known_sequences.end(), s_q) !=
           kb.known_sequences.end();
}

const BtNode* lookup(const KnowledgeBase& kb, const ConditionSequence& s_q) {
    for (std::size_t i = 0; i < kb.known_sequences.size(); ++i) {
        if (kb.known_sequences[i] == s_q) {
            return &kb.known_actions[i];
        }
    }
    return nullptr;
}

UpdateOutcome apply_update(KnowledgeBase& kb, ControlTree& control, const ConditionSequence& s_q,
                           const BtNode& action, const Registry& reg) {
    if (s_q.empty()) {
        throw ConfigError("apply_update requires a non-empty condition sequence");
    }
    if (knows(kb, s_q)) {
        return UpdateOutcome::AlreadyKnown;
    }
    BtNode t_k;
    try {
        t_k = make_knowledge_subtree(s_q, action);
        validate_tree(t_k, reg);
    } catch (const ConfigError&) {
        return UpdateOutcome::Rejected;
    }
    control = merge(control, t_k);
    kb.known_sequences.push_back(s_q);
    kb.known_actions.push_back(action);
    return UpdateOutcome::Updated;
}

void MessageBuffer::add(EavesdropMessage m) {
    if (m.timer <= 0) {
        throw ConfigError("buffered message timer must be positive");
    }
    for (EavesdropMessage& existing : messages_) {
        if (existing.sequence == m.sequence) {
            existing.timer = m.timer;
            existing.source_iteration = m.source_iteration;
            existing.action = std::move(m.action);
            return;
        }
    }
    messages_.push_back(std::move(m));
    if (capacity_ && messages_.size() > *capacity_) {
        auto victim = std::min_element(
            messages_.begin(), messages_.end(),
            [](const EavesdropMessage& a, const EavesdropMessage& b) { return a.timer < b.timer; });
        messages_.erase(victim);
    }
}

void MessageBuffer::tick() {
    for (EavesdropMessage& m : messages_) {
        --m.timer;
    }
    std::erase_if(messages_, [](const EavesdropMessage& m) { return m.timer <= 0; });
}

std::optional<EavesdropMessage> MessageBuffer::take(const ConditionSequence& s_q) {
    for (auto it = messages_.begin(); it != messages_.end(); ++it) {
        if (it->sequence == s_q) {
            EavesdropMessage out = std::move(*it);
            messages_.erase(it);
            return out;
        }
    }
    return std::nullopt;
}

}  // namespace swarmbt
