#include "swarmbt/metrics.hpp"

#include <ostream>
#include <sstream>

#include "json.hpp"

namespace swarmbt {

const char* to_string(UpdateSource source) {
    switch (source) {
        case UpdateSource::Q: return "Q";
        case UpdateSource::EU: return "EU";
        case UpdateSource::EBU: return "EBU";
    }
    return "?";
}

MetricsLedger::MetricsLedger(int robot_count) : per_robot_(static_cast<std::size_t>(robot_count)) {}

void MetricsLedger::record_query(int robot, std::int64_t iter) {
    events_.push_back(Event{iter, robot, EventKind::Query, UpdateSource::Q});
    ++totals_.queries;
    ++per_robot_.at(static_cast<std::size_t>(robot)).queries;
}

void MetricsLedger::record_effective(int robot, std::int64_t iter) {
    events_.push_back(Event{iter, robot, EventKind::Effective, UpdateSource::Q});
    ++totals_.effective;
    ++per_robot_.at(static_cast<std::size_t>(robot)).effective;
}

void MetricsLedger::record_update(int robot, std::int64_t iter, UpdateSource source) {
    events_.push_back(Event{iter, robot, EventKind::Update, source});
    Totals& robot_totals = per_robot_.at(static_cast<std::size_t>(robot));
    switch (source) {
        case UpdateSource::Q:
            ++totals_.upd_q;
            ++robot_totals.upd_q;
            break;
        case UpdateSource::EU:
            ++totals_.upd_eu;
            ++robot_totals.upd_eu;
            break;
        case UpdateSource::EBU:
            ++totals_.upd_ebu;
            ++robot_totals.upd_ebu;
            break;
    }
}

void MetricsLedger::sample_iteration(std::int64_t iter, std::int64_t collected) {
    timeline_.push_back(Row{iter, totals_.queries, totals_.effective, totals_.upd_q, totals_.upd_eu,
                            totals_.upd_ebu, collected});
}

double MetricsLedger::eq_percent() const {
    if (totals_.queries == 0) {
        return 1.0;
    }
    return static_cast<double>(totals_.effective) / static_cast<double>(totals_.queries);
}

MetricsLedger::Totals MetricsLedger::totals_for(int robot) const {
    return per_robot_.at(static_cast<std::size_t>(robot));
}

MetricsLedger::Totals MetricsLedger::totals_from_events() const {
    Totals out;
    for (const Event& ev : events_) {
        switch (ev.kind) {
            case EventKind::Query:
                ++out.queries;
                break;
            case EventKind::Effective:
                ++out.effective;
                break;
            case EventKind::Update:
                if (ev.source == UpdateSource::Q) {
                    ++out.upd_q;
                } else if (ev.source == UpdateSource::EU) {
                    ++out.upd_eu;
                } else {
                    ++out.upd_ebu;
                }
                break;
        }
    }
    return out;
}

void MetricsLedger::write_csv(std::ostream& out) const {
    out << "iter,queries,effective,upd_q,upd_eu,upd_ebu,collected\n";
    for (const Row& row : timeline_) {
        out << row.iter << ',' << row.queries << ',' << row.effective << ',' << row.upd_q << ','
            << row.upd_eu << ',' << row.upd_ebu << ',' << row.collected << '\n';
    }
}

std::string MetricsLedger::csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

std::string MetricsLedger::json() const {
    nlohmann::ordered_json doc;
    if (!config_echo.empty()) {
        doc["config"] = nlohmann::ordered_json::parse(config_echo);
    }
    doc["stop_iteration"] = stop_iteration;
    doc["completed"] = completed;
    doc["total_targets"] = total_targets;
    doc["collected"] = collected_final;
    doc["totals"] = {
        {"queries", totals_.queries},     {"effective", totals_.effective},
        {"eq_percent", eq_percent()},     {"upd_q", totals_.upd_q},
        {"upd_eu", totals_.upd_eu},       {"upd_ebu", totals_.upd_ebu},
        {"upd_total", totals_.upd_q + totals_.upd_eu + totals_.upd_ebu},
    };
    doc["knowledge_levels"] = knowledge_levels;

    nlohmann::ordered_json robots = nlohmann::ordered_json::array();
    for (const RobotAudit& audit : robot_audits) {
        nlohmann::ordered_json entry;
        entry["id"] = audit.id;
        entry["modality"] = audit.modality;
        entry["prior"] = audit.prior;
        entry["level"] = audit.level;
        entry["queries"] = audit.queries;
        entry["effective"] = audit.effective;
        entry["upd_q"] = audit.upd_q;
        entry["upd_eu"] = audit.upd_eu;
        entry["upd_ebu"] = audit.upd_ebu;
        entry["knowledge"] = {{"sequences", audit.sequences}, {"actions", audit.action_texts}};
        robots.push_back(std::move(entry));
    }
    doc["robots"] = std::move(robots);
    return doc.dump(2);
}

}  // namespace swarmbt
