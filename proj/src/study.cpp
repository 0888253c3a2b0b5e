#include "swarmbt/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifdef SWARMBT_HAS_OPENMP
#include <omp.h>
#endif

namespace swarmbt {
namespace {

namespace fs = std::filesystem;

constexpr std::array<ModalityKind, 4> kAllModalities = {ModalityKind::QRA, ModalityKind::QRU,
                                                        ModalityKind::EU, ModalityKind::EBU};

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

std::string format_value(double value) {
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        return std::to_string(static_cast<long long>(value));
    }
    return format_double(value);
}

double lerp(double desk, double paper, double t) { return desk + t * (paper - desk); }

long long round_ll(double v) { return static_cast<long long>(std::llround(v)); }

struct PresetParams {
    double arena = 1000.0;
    int ignorant = 19;
    int targets_per_type = 10;
    std::int64_t iterations = 20000;
    int trials = 5;
    double comm_range = 100.0;
    std::int64_t t_m = 1000;
    std::int64_t query_wait = 10;
    std::int64_t query_cooldown = 20;
    std::vector<double> range_sweep;
    std::vector<std::int64_t> buffer_sweep;
    std::vector<int> opportunity_sweep;
};

PresetParams preset_params(double scale) {
    if (scale <= 0.0) {
        throw ConfigError("scale must be positive");
    }
    const double t = (scale - 0.25) / 0.75;
    PresetParams p;
    p.arena = lerp(1000.0, 2000.0, t);
    p.ignorant = static_cast<int>(std::max<long long>(1, round_ll(lerp(19.0, 39.0, t))));
    p.targets_per_type = static_cast<int>(std::max<long long>(1, round_ll(lerp(10.0, 25.0, t))));
    p.iterations = std::max<long long>(1, round_ll(lerp(20000.0, 100000.0, t)));
    p.trials = static_cast<int>(std::max<long long>(1, round_ll(lerp(5.0, 20.0, t))));
    p.comm_range = lerp(100.0, 200.0, t);
    p.t_m = std::max<long long>(1, round_ll(lerp(1000.0, 5000.0, t)));

    // Pause and cooldown windows scale with the iteration budget, like t_m,
    // so the query cadence per trial matches across scales.
    const double iter_ratio = static_cast<double>(p.iterations) / 100000.0;
    p.query_wait = std::max<long long>(5, round_ll(50.0 * iter_ratio));
    p.query_cooldown = std::max<long long>(10, round_ll(100.0 * iter_ratio));

    // Communication ranges track the arena; the published list is exactly
    // the desk list doubled, matching the 2x arena side.
    const double range_factor = p.arena / 1000.0;
    for (double base : {50.0, 100.0, 250.0, 400.0, 500.0}) {
        p.range_sweep.push_back(base * range_factor);
    }

    if (scale >= 1.0) {
        p.buffer_sweep = {200, 500, 1000, 2000, 5000, 10000, 15000};
    } else {
        const double iter_factor = static_cast<double>(p.iterations) / 20000.0;
        for (std::int64_t base : {100, 250, 500, 1000, 2500}) {
            p.buffer_sweep.push_back(std::max<std::int64_t>(1, round_ll(base * iter_factor)));
        }
    }

    const double opp_factor = static_cast<double>(p.targets_per_type) / 10.0;
    for (int base : {4, 10, 20, 40}) {
        p.opportunity_sweep.push_back(
            static_cast<int>(std::max<long long>(1, round_ll(base * opp_factor))));
    }
    return p;
}

WorldConfig base_config(const PresetParams& p) {
    WorldConfig cfg;
    cfg.arena_x = p.arena;
    cfg.arena_y = p.arena;
    cfg.target_counts = {p.targets_per_type, p.targets_per_type, p.targets_per_type,
                         p.targets_per_type};
    cfg.comm_range = p.comm_range;
    cfg.buffer_duration = p.t_m;
    cfg.iterations = p.iterations;
    cfg.query_wait = p.query_wait;
    cfg.query_cooldown = p.query_cooldown;
    return cfg;
}

std::vector<RosterGroup> roster_for(ModalityKind modality, int ignorant) {
    return {RosterGroup{modality, PriorClass::I, ignorant}, RosterGroup{modality, PriorClass::M, 1}};
}

TrialSummary summarize(const MetricsLedger& ledger, int trial, std::uint64_t seed) {
    TrialSummary s;
    s.trial = trial;
    s.seed = seed;
    s.stop_iteration = ledger.stop_iteration;
    s.completed = ledger.completed;
    s.collected = ledger.collected_final;
    s.queries = ledger.totals().queries;
    s.effective = ledger.totals().effective;
    s.eq_percent = ledger.eq_percent();
    s.upd_q = ledger.totals().upd_q;
    s.upd_eu = ledger.totals().upd_eu;
    s.upd_ebu = ledger.totals().upd_ebu;
    s.levels = ledger.knowledge_levels;
    return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write output file: " + path.string());
    }
    out << text;
}

struct Task {
    std::size_t point = 0;
    int trial = 0;
};

StudyReport run_study_impl(const StudySpec& spec, const StudyOptions& opts, int jobs) {
    if (spec.points.empty() || spec.trials < 1) {
        throw ConfigError("study spec needs at least one sweep point and one trial");
    }

    StudyReport report;
    report.id = spec.id;
    report.name = spec.name;
    report.trials = spec.trials;
    report.base_seed = spec.base_seed;
    report.points.resize(spec.points.size());
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        report.points[i].label = spec.points[i].label;
        report.points[i].modality = spec.points[i].modality;
        report.points[i].value = spec.points[i].value;
        report.points[i].trials.resize(static_cast<std::size_t>(spec.trials));
    }

    const fs::path out_root = opts.out_dir.empty() ? fs::path{} : fs::path(opts.out_dir) / spec.name;
    if (!opts.out_dir.empty()) {
        for (const SweepPoint& point : spec.points) {
            fs::create_directories(out_root / point.label);
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(spec.points.size() * static_cast<std::size_t>(spec.trials));
    for (std::size_t p = 0; p < spec.points.size(); ++p) {
        for (int trial = 0; trial < spec.trials; ++trial) {
            tasks.push_back(Task{p, trial});
        }
    }

    std::exception_ptr failure;

    auto run_task = [&](const Task& task) {
        const SweepPoint& point = spec.points[task.point];
        WorldConfig cfg = point.config;
        cfg.seed = spec.base_seed + static_cast<std::uint64_t>(task.trial);
        const MetricsLedger ledger = run_trial(cfg);
        report.points[task.point].trials[static_cast<std::size_t>(task.trial)] =
            summarize(ledger, task.trial, cfg.seed);
        if (!opts.out_dir.empty()) {
            const fs::path dir = out_root / point.label;
            write_text_file(dir / (std::to_string(task.trial) + ".csv"), ledger.csv());
            write_text_file(dir / (std::to_string(task.trial) + ".summary.json"), ledger.json());
        }
    };

#ifdef SWARMBT_HAS_OPENMP
    if (jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            try {
                run_task(tasks[i]);
            } catch (...) {
#pragma omp critical
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    } else
#endif
    {
        (void)jobs;
        for (const Task& task : tasks) {
            run_task(task);
        }
    }

    if (failure) {
        std::rethrow_exception(failure);
    }

    if (!opts.out_dir.empty()) {
        write_aggregates(report, (fs::path(opts.out_dir) / spec.name).string());
    }
    return report;
}

}  // namespace

const char* to_string(StudyId id) {
    switch (id) {
        case StudyId::ModalityCompare: return "modality-compare";
        case StudyId::CommRange: return "comm-range";
        case StudyId::Opportunities: return "opportunities";
        case StudyId::BufferDuration: return "buffer-duration";
    }
    return "?";
}

std::optional<StudyId> study_from_string(const std::string& text) {
    if (text == "modality-compare") return StudyId::ModalityCompare;
    if (text == "comm-range") return StudyId::CommRange;
    if (text == "opportunities") return StudyId::Opportunities;
    if (text == "buffer-duration") return StudyId::BufferDuration;
    return std::nullopt;
}

std::vector<double> PointReport::metric(double (*fn)(const TrialSummary&)) const {
    std::vector<double> out;
    out.reserve(trials.size());
    for (const TrialSummary& trial : trials) {
        out.push_back(fn(trial));
    }
    return out;
}

const PointReport& StudyReport::point(const std::string& label) const {
    for (const PointReport& p : points) {
        if (p.label == label) {
            return p;
        }
    }
    throw ConfigError("no sweep point labeled '" + label + "'");
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - out.mean) * (v - out.mean);
        }
        out.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return out;
}

StudyReport run_study(const StudySpec& spec, const StudyOptions& opts) {
    return run_study_impl(spec, opts, std::max(1, opts.jobs));
}

StudyReport run_study_serial(const StudySpec& spec, const StudyOptions& opts) {
    return run_study_impl(spec, opts, 1);
}

StudySpec make_preset(StudyId id, double scale, int trials_override, std::uint64_t base_seed) {
    const PresetParams p = preset_params(scale);
    StudySpec spec;
    spec.id = id;
    spec.name = to_string(id);
    spec.trials = trials_override > 0 ? trials_override : p.trials;
    spec.base_seed = base_seed;

    switch (id) {
        case StudyId::ModalityCompare: {
            int index = 0;
            for (ModalityKind modality : kAllModalities) {
                SweepPoint point;
                point.label = to_string(modality);
                point.modality = modality;
                point.value = index++;
                point.config = base_config(p);
                point.config.roster = roster_for(modality, p.ignorant);
                spec.points.push_back(std::move(point));
            }
            break;
        }
        case StudyId::CommRange: {
            for (double range : p.range_sweep) {
                for (ModalityKind modality : kAllModalities) {
                    SweepPoint point;
                    point.label = "r" + std::to_string(static_cast<long long>(range)) + "-" +
                                  to_string(modality);
                    point.modality = modality;
                    point.value = range;
                    point.config = base_config(p);
                    point.config.comm_range = range;
                    point.config.roster = roster_for(modality, p.ignorant);
                    spec.points.push_back(std::move(point));
                }
            }
            break;
        }
        case StudyId::Opportunities: {
            for (int count : p.opportunity_sweep) {
                for (ModalityKind modality :
                     {ModalityKind::QRU, ModalityKind::EU, ModalityKind::EBU}) {
                    SweepPoint point;
                    point.label = "n" + std::to_string(count) + "-" + to_string(modality);
                    point.modality = modality;
                    point.value = count;
                    point.config = base_config(p);
                    point.config.target_counts = {count, count, count, count};
                    point.config.roster = roster_for(modality, p.ignorant);
                    spec.points.push_back(std::move(point));
                }
            }
            break;
        }
        case StudyId::BufferDuration: {
            for (std::int64_t t_m : p.buffer_sweep) {
                SweepPoint point;
                point.label = "tm" + std::to_string(t_m);
                point.modality = ModalityKind::EBU;
                point.value = static_cast<double>(t_m);
                point.config = base_config(p);
                point.config.buffer_duration = t_m;
                point.config.roster = roster_for(ModalityKind::EBU, p.ignorant);
                spec.points.push_back(std::move(point));
            }
            break;
        }
    }
    return spec;
}

StudySpec study_spec_from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("study spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("$: study spec must be a JSON object");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "study" && key != "scale" && key != "trials" && key != "seed" &&
            key != "overrides") {
            throw ConfigError("$." + key + ": unknown key");
        }
    }
    if (!doc.contains("study") || !doc["study"].is_string()) {
        throw ConfigError("$.study: required string");
    }
    const auto id = study_from_string(doc["study"].get<std::string>());
    if (!id) {
        throw ConfigError("$.study: unknown study '" + doc["study"].get<std::string>() + "'");
    }
    const double scale = doc.value("scale", 0.25);
    int trials = -1;
    if (doc.contains("trials")) {
        if (!doc["trials"].is_number_integer() || doc["trials"].get<int>() < 1) {
            throw ConfigError("$.trials: expected integer >= 1");
        }
        trials = doc["trials"].get<int>();
    }
    std::uint64_t seed = 1;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) {
            throw ConfigError("$.seed: expected integer");
        }
        seed = doc["seed"].get<std::uint64_t>();
    }
    StudySpec spec = make_preset(*id, scale, trials, seed);

    if (doc.contains("overrides")) {
        const nlohmann::json& overrides = doc["overrides"];
        if (!overrides.is_object()) {
            throw ConfigError("$.overrides: expected an object");
        }
        for (SweepPoint& point : spec.points) {
            nlohmann::json merged =
                nlohmann::json::parse(world_config_to_json_text(point.config));
            for (const auto& [key, value] : overrides.items()) {
                merged[key] = value;
            }
            point.config = world_config_from_json_text(merged.dump());
        }
    }
    return spec;
}

StudySpec load_study_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open study spec file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return study_spec_from_json_text(buffer.str());
}

void write_aggregates(const StudyReport& report, const std::string& dir) {
    fs::create_directories(dir);

    std::ostringstream agg;
    agg << "study,sweep_label,sweep_value,modality,trials,completion_mean,completion_std,"
           "collected_mean,collected_std,queries_mean,queries_std,effective_mean,effective_std,"
           "eq_percent_mean,eq_percent_std,upd_q_mean,upd_q_std,upd_eu_mean,upd_eu_std,"
           "upd_ebu_mean,upd_ebu_std,upd_total_mean,upd_total_std,"
           "lvl0_mean,lvl1_mean,lvl2_mean,lvl3_mean,lvl4_mean\n";

    std::ostringstream plot;
    plot << "study,sweep_value,modality,metric,mean,stddev\n";

    for (const PointReport& point : report.points) {
        auto collect = [&point](auto fn) {
            std::vector<double> out;
            out.reserve(point.trials.size());
            for (const TrialSummary& t : point.trials) {
                out.push_back(fn(t));
            }
            return out;
        };
        const MeanStd completion =
            mean_std(collect([](const TrialSummary& t) { return double(t.stop_iteration); }));
        const MeanStd collected =
            mean_std(collect([](const TrialSummary& t) { return double(t.collected); }));
        const MeanStd queries =
            mean_std(collect([](const TrialSummary& t) { return double(t.queries); }));
        const MeanStd effective =
            mean_std(collect([](const TrialSummary& t) { return double(t.effective); }));
        const MeanStd eq =
            mean_std(collect([](const TrialSummary& t) { return t.eq_percent; }));
        const MeanStd upd_q =
            mean_std(collect([](const TrialSummary& t) { return double(t.upd_q); }));
        const MeanStd upd_eu =
            mean_std(collect([](const TrialSummary& t) { return double(t.upd_eu); }));
        const MeanStd upd_ebu =
            mean_std(collect([](const TrialSummary& t) { return double(t.upd_ebu); }));
        const MeanStd upd_total =
            mean_std(collect([](const TrialSummary& t) { return double(t.upd_total()); }));
        std::array<MeanStd, 5> levels;
        for (std::size_t lvl = 0; lvl < 5; ++lvl) {
            std::vector<double> values;
            for (const TrialSummary& t : point.trials) {
                values.push_back(static_cast<double>(t.levels[lvl]));
            }
            levels[lvl] = mean_std(values);
        }

        agg << report.name << ',' << point.label << ',' << format_value(point.value) << ','
            << to_string(point.modality) << ',' << point.trials.size() << ','
            << format_double(completion.mean) << ',' << format_double(completion.stddev) << ','
            << format_double(collected.mean) << ',' << format_double(collected.stddev) << ','
            << format_double(queries.mean) << ',' << format_double(queries.stddev) << ','
            << format_double(effective.mean) << ',' << format_double(effective.stddev) << ','
            << format_double(eq.mean) << ',' << format_double(eq.stddev) << ','
            << format_double(upd_q.mean) << ',' << format_double(upd_q.stddev) << ','
            << format_double(upd_eu.mean) << ',' << format_double(upd_eu.stddev) << ','
            << format_double(upd_ebu.mean) << ',' << format_double(upd_ebu.stddev) << ','
            << format_double(upd_total.mean) << ',' << format_double(upd_total.stddev) << ','
            << format_double(levels[0].mean) << ',' << format_double(levels[1].mean) << ','
            << format_double(levels[2].mean) << ',' << format_double(levels[3].mean) << ','
            << format_double(levels[4].mean) << '\n';

        auto plot_row = [&](const char* metric, const MeanStd& stat) {
            plot << report.name << ',' << format_value(point.value) << ','
                 << to_string(point.modality) << ',' << metric << ',' << format_double(stat.mean)
                 << ',' << format_double(stat.stddev) << '\n';
        };
        plot_row("completion", completion);
        plot_row("collected", collected);
        plot_row("queries", queries);
        plot_row("effective", effective);
        plot_row("eq_percent", eq);
        plot_row("upd_q", upd_q);
        plot_row("upd_eu", upd_eu);
        plot_row("upd_ebu", upd_ebu);
        plot_row("upd_total", upd_total);
    }

    write_text_file(fs::path(dir) / "aggregate.csv", agg.str());
    write_text_file(fs::path(dir) / "plotdata.csv", plot.str());
}

}  // namespace swarmbt
