#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "swarmbt/knowledge.hpp"
#include "swarmbt/metrics.hpp"

namespace swarmbt {

/// Knowledge-transfer policy, fixed per robot for a whole trial:
///   QRA - query-response-action: responses are executed once, never retained.
///   QRU - query-response-update: responses are merged into the control tree.
///   EU  - eavesdrop-update: overheard responses merged immediately (plus QRU).
///   EBU - eavesdrop-buffer-update: overheard responses buffered, merged on
///         demand when the matching condition is faced (plus QRU fallback).
enum class ModalityKind { QRA, QRU, EU, EBU };

const char* to_string(ModalityKind kind);
std::optional<ModalityKind> modality_from_string(const std::string& text);

struct WireQuery {
    int sender = 0;
    ConditionSequence sequence;
    std::int64_t iteration = 0;
};

struct WireResponse {
    int sender = 0;
    int recipient = 0;
    ConditionSequence sequence;
    std::string action_text;  // canonical stringBT of the answering subtree
    std::int64_t iteration = 0;
};

// Blackboard keys owned by the modality machine.
inline constexpr const char* kKeyWaiting = "waiting";
inline constexpr const char* kKeyQueryWait = "query_wait";
inline constexpr const char* kKeyQueryCooldown = "query_cooldown";
inline constexpr const char* kKeyWaitSequence = "wait_seq";
// Set by the fallback segment's actions while they run; the query trigger
// requires the current tick to have fallen through every knowledge segment.
inline constexpr const char* kKeyAtFallback = "at_fallback";

void init_modality_keys(Blackboard& bb);

struct ModalityConfig {
    std::int64_t query_wait = 50;      // iterations a querying robot stays paused
    std::int64_t query_cooldown = 100; // minimum iterations between own queries
    std::int64_t buffer_duration = 5000;  // t_m for buffered messages
    std::optional<std::size_t> buffer_capacity;  // unbounded by default
};

/// Maps the current salient percept to the condition sequence it would take
/// to handle it, or nullopt when nothing queryable is in front of the robot.
/// Supplied by the simulation; keeps the machine domain-independent.
using PerceptFn = std::function<std::optional<ConditionSequence>(const Blackboard&)>;

/// Parses an overheard response into a buffered message with timer t_m.
/// Returns nullopt on corrupt payloads.
std::optional<EavesdropMessage> make_eavesdrop_message(const WireResponse& r, std::int64_t t_m,
                                                       std::int64_t iter);

/// True when `observer` may record the exchange: not an endpoint, running an
/// eavesdropping modality, and within range of both sender and recipient.
bool can_intercept(ModalityKind observer_modality, int observer_id, const WireResponse& r,
                   Vec2 observer_pos, Vec2 sender_pos, Vec2 recipient_pos, double range);

/// One robot's knowledge-transfer state machine: the knowledge base, the
/// message buffer, the live control tree and the query/wait bookkeeping.
/// The machine is driven by the simulation in fixed phases; it never touches
/// the world directly.
class KnowledgeAgent {
public:
    KnowledgeAgent(int id, ModalityKind modality, ModalityConfig cfg, const Registry* reg,
                   PerceptFn percept);

    int id() const { return id_; }
    ModalityKind modality() const { return modality_; }
    const ModalityConfig& config() const { return cfg_; }

    /// Installs the initial control tree and compiles the live root
    /// Parallel(T_Control, T_Mod). Validates against the blackboard schema.
    void install_control(ControlTree control, const Blackboard* schema);

    const ControlTree& control() const { return control_; }
    const BtNode& live_tree() const { return live_root_; }
    std::string control_text() const;

    KnowledgeBase& kb() { return kb_; }
    const KnowledgeBase& kb() const { return kb_; }
    MessageBuffer& buffer() { return buffer_; }
    const MessageBuffer& buffer() const { return buffer_; }
    bool has_transient() const { return transient_.has_value(); }

    /// Response addressed to this robot. Accepts only while waiting for the
    /// matching sequence; first response wins. QRA installs a transient
    /// subtree, the update modalities merge. Malformed payloads are ignored
    /// and the robot keeps waiting.
    void handle_response(const WireResponse& r, Blackboard& bb, std::int64_t iter, MetricsLedger& m);

    /// Third-party response overheard (eligibility already checked).
    void note_intercepted(const WireResponse& r, std::int64_t iter);

    /// EU bulk merge: every buffered message with an unknown sequence is
    /// merged, then the buffer is cleared unconditionally. Returns false on
    /// an empty buffer.
    bool eu_process(std::int64_t iter, MetricsLedger& m);

    /// EBU on-demand merge: takes the buffered message matching s_q and
    /// merges it. Returns true when a merge happened (no query needed).
    bool ebu_process(const ConditionSequence& s_q, std::int64_t iter, MetricsLedger& m);

    /// The per-iteration T_Mod step, run from inside the robot's tick: ages
    /// the wait/cooldown counters, evaluates the query trigger and returns
    /// the query to broadcast, if any. A waiting robot stays paused and never
    /// triggers.
    std::optional<WireQuery> modality_step(Blackboard& bb, std::int64_t iter, MetricsLedger& m);

    /// Ticks the transient subtree in place of the fallback; Failure when
    /// none is installed. The transient is discarded as soon as it settles.
    NodeStatus tick_transient(Blackboard& bb);

    /// Recompiles the live tree after merges; the new tree is the robot's
    /// live tree from the next tick on.
    void recompile_if_dirty(const Blackboard* schema);

    bool waiting(const Blackboard& bb) const { return bb.get_bool(kKeyWaiting); }

private:
    bool try_update(const ConditionSequence& s_q, const BtNode& action, UpdateSource source,
                    std::int64_t iter, MetricsLedger& m);

    int id_;
    ModalityKind modality_;
    ModalityConfig cfg_;
    const Registry* reg_;
    PerceptFn percept_;
    KnowledgeBase kb_;
    MessageBuffer buffer_;
    ControlTree control_;
    BtNode live_root_;
    std::optional<BtNode> transient_;
    bool dirty_ = false;
};

/// Responder side of the query-response process: a response carrying the
/// serialized knowledge subtree when the agent knows q.sequence. Range and
/// arbitration (lowest eligible id answers) are the medium's concern.
std::optional<WireResponse> maybe_respond(const KnowledgeAgent& agent, const WireQuery& q,
                                          std::int64_t iter);

/// Synchronous range-limited broadcast mailbox. Queries posted in iteration
/// i are delivered in i; responses produced in i are delivered in i+1.
class BroadcastMedium {
public:
    explicit BroadcastMedium(double range) : range_(range) {}

    double range() const { return range_; }

    static bool in_range(Vec2 a, Vec2 b, double range);

    void post_query(WireQuery q) { queries_.push_back(std::move(q)); }
    void post_response(WireResponse r) { responses_.push_back(std::move(r)); }

    /// Queries posted during the current iteration, in posting order.
    std::vector<WireQuery> take_queries();

    /// Responses posted during the previous iteration.
    std::vector<WireResponse> take_responses();

private:
    double range_;
    std::vector<WireQuery> queries_;
    std::vector<WireResponse> responses_;
};

}  // namespace swarmbt
