#include "swarmbt/modalities.hpp"

#include <cmath>
#include <utility>

namespace swarmbt {

const char* to_string(ModalityKind kind) {
    switch (kind) {
        case ModalityKind::QRA: return "QRA";
        case ModalityKind::QRU: return "QRU";
        case ModalityKind::EU: return "EU";
        case ModalityKind::EBU: return "EBU";
    }
    return "?";
}

std::optional<ModalityKind> modality_from_string(const std::string& text) {
    if (text == "QRA") return ModalityKind::QRA;
    if (text == "QRU") return ModalityKind::QRU;
    if (text == "EU") return ModalityKind::EU;
    if (text == "EBU") return ModalityKind::EBU;
    return std::nullopt;
}

void init_modality_keys(Blackboard& bb) {
    bb.set(kKeyWaiting, false);
    bb.set(kKeyQueryWait, std::int64_t{0});
    bb.set(kKeyQueryCooldown, std::int64_t{0});
    bb.set(kKeyWaitSequence, std::string{});
    bb.set(kKeyAtFallback, false);
}

std::optional<EavesdropMessage> make_eavesdrop_message(const WireResponse& r, std::int64_t t_m,
                                                       std::int64_t iter) {
    if (t_m <= 0) {
        return std::nullopt;
    }
    try {
        EavesdropMessage m;
        m.sequence = r.sequence;
        m.action = parse(r.action_text);
        m.timer = t_m;
        m.source_iteration = iter;
        return m;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

bool can_intercept(ModalityKind observer_modality, int observer_id, const WireResponse& r,
                   Vec2 observer_pos, Vec2 sender_pos, Vec2 recipient_pos, double range) {
    if (observer_id == r.sender || observer_id == r.recipient) {
        return false;
    }
    if (observer_modality != ModalityKind::EU && observer_modality != ModalityKind::EBU) {
        return false;
    }
    return BroadcastMedium::in_range(observer_pos, sender_pos, range) &&
           BroadcastMedium::in_range(observer_pos, recipient_pos, range);
}

KnowledgeAgent::KnowledgeAgent(int id, ModalityKind modality, ModalityConfig cfg,
                               const Registry* reg, PerceptFn percept)
    : id_(id),
      modality_(modality),
      cfg_(cfg),
      reg_(reg),
      percept_(std::move(percept)),
      buffer_(cfg.buffer_capacity) {}

void KnowledgeAgent::install_control(ControlTree control, const Blackboard* schema) {
    control_ = std::move(control);
    nk_slot(control_);  // enforce the single insertion region
    dirty_ = true;
    recompile_if_dirty(schema);
}

std::string KnowledgeAgent::control_text() const { return serialize(control_.root); }

void KnowledgeAgent::recompile_if_dirty(const Blackboard* schema) {
    if (!dirty_) {
        return;
    }
    // The live tree is rebuilt from the canonical text form, the same path a
    // received subtree would take.
    live_root_ = make_parallel({compile(serialize(control_.root), *reg_, schema),
                                make_action("modality_step")});
    dirty_ = false;
}

bool KnowledgeAgent::try_update(const ConditionSequence& s_q, const BtNode& action,
                                UpdateSource source, std::int64_t iter, MetricsLedger& m) {
    const UpdateOutcome outcome = apply_update(kb_, control_, s_q, action, *reg_);
    if (outcome == UpdateOutcome::Updated) {
        m.record_update(id_, iter, source);
        dirty_ = true;
        return true;
    }
    return outcome == UpdateOutcome::AlreadyKnown;
}

void KnowledgeAgent::handle_response(const WireResponse& r, Blackboard& bb, std::int64_t iter,
                                     MetricsLedger& m) {
    if (!bb.get_bool(kKeyWaiting) || bb.get_string(kKeyWaitSequence) != to_text(r.sequence)) {
        return;  // not waiting for this sequence; late or duplicate response
    }

    if (modality_ == ModalityKind::QRA) {
        BtNode action;
        try {
            action = parse(r.action_text);
            validate_tree(action, *reg_, &bb);
        } catch (const std::exception&) {
            return;  // corrupt payload; keep waiting for a usable response
        }
        transient_ = std::move(action);
    } else {
        BtNode action;
        try {
            action = parse(r.action_text);
        } catch (const ParseError&) {
            return;
        }
        const UpdateOutcome outcome = apply_update(kb_, control_, r.sequence, action, *reg_);
        if (outcome == UpdateOutcome::Rejected) {
            return;
        }
        if (outcome == UpdateOutcome::Updated) {
            m.record_update(id_, iter, UpdateSource::Q);
            dirty_ = true;
        }
    }

    m.record_effective(id_, iter);
    bb.set(kKeyWaiting, false);
    bb.set(kKeyQueryWait, std::int64_t{0});
    bb.set(kKeyWaitSequence, std::string{});
}

void KnowledgeAgent::note_intercepted(const WireResponse& r, std::int64_t iter) {
    if (auto m_eve = make_eavesdrop_message(r, cfg_.buffer_duration, iter)) {
        buffer_.add(std::move(*m_eve));
    }
}

bool KnowledgeAgent::eu_process(std::int64_t iter, MetricsLedger& m) {
    if (buffer_.empty()) {
        return false;
    }
    for (const EavesdropMessage& msg : buffer_.messages()) {
        if (!knows(kb_, msg.sequence)) {
            try_update(msg.sequence, msg.action, UpdateSource::EU, iter, m);
        }
    }
    buffer_.clear();
    return true;
}

bool KnowledgeAgent::ebu_process(const ConditionSequence& s_q, std::int64_t iter, MetricsLedger& m) {
    std::optional<EavesdropMessage> msg = buffer_.take(s_q);
    if (!msg) {
        return false;
    }
    return try_update(msg->sequence, msg->action, UpdateSource::EBU, iter, m);
}

std::optional<WireQuery> KnowledgeAgent::modality_step(Blackboard& bb, std::int64_t iter,
                                                       MetricsLedger& m) {
    const std::int64_t cooldown = bb.get_int(kKeyQueryCooldown);
    if (cooldown > 0) {
        bb.set(kKeyQueryCooldown, cooldown - 1);
    }

    if (bb.get_bool(kKeyWaiting)) {
        const std::int64_t remaining = bb.get_int(kKeyQueryWait) - 1;
        bb.set(kKeyQueryWait, remaining);
        if (remaining <= 0) {
            bb.set(kKeyWaiting, false);
            bb.set(kKeyWaitSequence, std::string{});
        }
        return std::nullopt;  // paused awaiting a response
    }

    if (!bb.get_bool(kKeyAtFallback)) {
        return std::nullopt;  // some knowledge segment handled this tick
    }

    const std::optional<ConditionSequence> s_q = percept_ ? percept_(bb) : std::nullopt;
    if (!s_q || transient_.has_value() || knows(kb_, *s_q)) {
        return std::nullopt;
    }

    // The buffer is searched before any query is considered.
    if (modality_ == ModalityKind::EBU && ebu_process(*s_q, iter, m)) {
        return std::nullopt;
    }

    if (bb.get_int(kKeyQueryCooldown) > 0) {
        return std::nullopt;
    }

    bb.set(kKeyWaiting, true);
    bb.set(kKeyQueryWait, cfg_.query_wait);
    bb.set(kKeyWaitSequence, to_text(*s_q));
    bb.set(kKeyQueryCooldown, cfg_.query_cooldown);
    m.record_query(id_, iter);
    return WireQuery{id_, *s_q, iter};
}

NodeStatus KnowledgeAgent::tick_transient(Blackboard& bb) {
    if (!transient_) {
        return NodeStatus::Failure;
    }
    const NodeStatus st = tick(*transient_, bb, *reg_);
    if (st != NodeStatus::Running) {
        transient_.reset();
    }
    return st;
}

std::optional<WireResponse> maybe_respond(const KnowledgeAgent& agent, const WireQuery& q,
                                          std::int64_t iter) {
    if (q.sender == agent.id()) {
        return std::nullopt;
    }
    const BtNode* action = lookup(agent.kb(), q.sequence);
    if (!action) {
        return std::nullopt;
    }
    return WireResponse{agent.id(), q.sender, q.sequence, serialize(*action), iter};
}

bool BroadcastMedium::in_range(Vec2 a, Vec2 b, double range) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy) <= range;
}

std::vector<WireQuery> BroadcastMedium::take_queries() {
    std::vector<WireQuery> out;
    out.swap(queries_);
    return out;
}

std::vector<WireResponse> BroadcastMedium::take_responses() {
    std::vector<WireResponse> out;
    out.swap(responses_);
    return out;
}

}  // namespace swarmbt
