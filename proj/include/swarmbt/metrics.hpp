#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace swarmbt {

enum class UpdateSource { Q, EU, EBU };

const char* to_string(UpdateSource source);

/// Per-trial counters and timelines: cumulative queries, effective queries,
/// updates split by source, the collection timeline, and end-of-trial
/// knowledge levels. Events are append-only; the running counters can always
/// be recomputed from the event log.
class MetricsLedger {
public:
    enum class EventKind { Query, Effective, Update };

    struct Event {
        std::int64_t iter = 0;
        int robot = 0;
        EventKind kind = EventKind::Query;
        UpdateSource source = UpdateSource::Q;
    };

    /// Cumulative totals sampled at the end of one iteration.
    struct Row {
        std::int64_t iter = 0;
        std::int64_t queries = 0;
        std::int64_t effective = 0;
        std::int64_t upd_q = 0;
        std::int64_t upd_eu = 0;
        std::int64_t upd_ebu = 0;
        std::int64_t collected = 0;

        bool operator==(const Row&) const = default;
    };

    struct Totals {
        std::int64_t queries = 0;
        std::int64_t effective = 0;
        std::int64_t upd_q = 0;
        std::int64_t upd_eu = 0;
        std::int64_t upd_ebu = 0;

        bool operator==(const Totals&) const = default;
    };

    struct RobotAudit {
        int id = 0;
        std::string modality;
        std::string prior;
        int level = 0;
        std::int64_t queries = 0;
        std::int64_t effective = 0;
        std::int64_t upd_q = 0;
        std::int64_t upd_eu = 0;
        std::int64_t upd_ebu = 0;
        std::vector<std::string> sequences;     // canonical condition-sequence texts
        std::vector<std::string> action_texts;  // stringBT forms of the aligned actions
    };

    explicit MetricsLedger(int robot_count = 0);

    void record_query(int robot, std::int64_t iter);
    void record_effective(int robot, std::int64_t iter);
    void record_update(int robot, std::int64_t iter, UpdateSource source);

    /// Appends the cumulative row for one finished iteration.
    void sample_iteration(std::int64_t iter, std::int64_t collected);

    /// Proportion of posted queries that elicited a response; 1.0 when no
    /// query was ever posted.
    double eq_percent() const;

    const std::vector<Event>& events() const { return events_; }
    const std::vector<Row>& timeline() const { return timeline_; }
    const Totals& totals() const { return totals_; }
    Totals totals_for(int robot) const;

    /// Recomputes the totals from the event log; must equal totals().
    Totals totals_from_events() const;

    std::string csv() const;
    void write_csv(std::ostream& out) const;

    /// Full trial report: totals, per-robot audits, knowledge-level
    /// histogram, config echo. Stable key order, bit-stable for a fixed seed.
    std::string json() const;

    // Trial finalization, filled by the scheduler.
    std::int64_t stop_iteration = 0;
    bool completed = false;
    std::int64_t total_targets = 0;
    std::int64_t collected_final = 0;
    std::array<std::int64_t, 5> knowledge_levels{};
    std::vector<RobotAudit> robot_audits;
    std::string config_echo;                // JSON text of the originating config
    std::vector<std::string> wire_trace;    // JSON lines, populated when tracing

private:
    std::vector<Event> events_;
    std::vector<Row> timeline_;
    Totals totals_;
    std::vector<Totals> per_robot_;
};

}  // namespace swarmbt
