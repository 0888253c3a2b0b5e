#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "swarmbt/study.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitTrialBug = 1;
constexpr int kExitUsage = 2;

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw swarmbt::ConfigError("cannot write " + path.string());
    }
    out << text;
}

int run_single(const std::string& config_path, std::optional<std::uint64_t> seed,
               const std::string& out_dir, bool trace, bool trace_to_stdout) {
    swarmbt::WorldConfig cfg = swarmbt::load_world_config(config_path);
    if (seed) {
        cfg.seed = *seed;
    }
    cfg.trace = cfg.trace || trace;

    const swarmbt::MetricsLedger ledger = swarmbt::run_trial(cfg);

    if (trace_to_stdout) {
        for (const std::string& line : ledger.wire_trace) {
            std::cout << line << '\n';
        }
    }
    if (!out_dir.empty()) {
        write_file(fs::path(out_dir) / "timeline.csv", ledger.csv());
        write_file(fs::path(out_dir) / "summary.json", ledger.json());
        if (cfg.trace) {
            std::string lines;
            for (const std::string& line : ledger.wire_trace) {
                lines += line;
                lines += '\n';
            }
            write_file(fs::path(out_dir) / "trace.jsonl", lines);
        }
    }
    std::cerr << "trial done: stop_iteration=" << ledger.stop_iteration
              << " collected=" << ledger.collected_final << "/" << ledger.total_targets
              << " queries=" << ledger.totals().queries << " updates="
              << ledger.totals().upd_q + ledger.totals().upd_eu + ledger.totals().upd_ebu << '\n';
    return kExitOk;
}

void print_study_summary(const swarmbt::StudyReport& report) {
    std::printf("%-18s %-10s %12s %10s %8s %8s %8s %8s\n", "point", "modality", "completion",
                "queries", "eq%", "upd_q", "upd_eu", "upd_ebu");
    for (const swarmbt::PointReport& point : report.points) {
        auto mean_of = [&point](auto fn) {
            std::vector<double> values;
            for (const swarmbt::TrialSummary& t : point.trials) {
                values.push_back(fn(t));
            }
            return swarmbt::mean_std(values).mean;
        };
        std::printf("%-18s %-10s %12.1f %10.1f %8.3f %8.1f %8.1f %8.1f\n", point.label.c_str(),
                    to_string(point.modality),
                    mean_of([](const swarmbt::TrialSummary& t) { return double(t.stop_iteration); }),
                    mean_of([](const swarmbt::TrialSummary& t) { return double(t.queries); }),
                    mean_of([](const swarmbt::TrialSummary& t) { return t.eq_percent; }),
                    mean_of([](const swarmbt::TrialSummary& t) { return double(t.upd_q); }),
                    mean_of([](const swarmbt::TrialSummary& t) { return double(t.upd_eu); }),
                    mean_of([](const swarmbt::TrialSummary& t) { return double(t.upd_ebu); }));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavior-tree knowledge-transfer swarm simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed_value = 0;
    bool trace = false;

    CLI::App* run_cmd = app.add_subcommand("run", "Run a single trial from a config file");
    run_cmd->add_option("config", config_path, "World config JSON file")->required();
    CLI::Option* run_seed = run_cmd->add_option("--seed", seed_value, "Seed override");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_flag("--trace", trace, "Write the JSON-lines message trace");

    std::string study_arg;
    double scale = 0.25;
    int trials = -1;
    int jobs = 1;
    std::uint64_t study_seed = 1;
    CLI::App* study_cmd = app.add_subcommand("study", "Run a study preset or spec file");
    study_cmd->add_option("study", study_arg,
                          "Preset (modality-compare, comm-range, opportunities, buffer-duration) "
                          "or a study spec JSON file")
        ->required();
    CLI::Option* scale_opt = study_cmd->add_option("--scale", scale, "Preset scale (0.25 = desk)");
    CLI::Option* trials_opt = study_cmd->add_option("--trials", trials, "Trials per sweep point");
    study_cmd->add_option("--jobs", jobs, "Parallel trial workers")->check(CLI::PositiveNumber);
    CLI::Option* study_seed_opt = study_cmd->add_option("--seed", study_seed, "Base seed");
    study_cmd->add_option("--out", out_dir, "Output directory");

    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a config file against the schema");
    validate_cmd->add_option("config", config_path, "World config JSON file")->required();

    CLI::App* trace_cmd =
        app.add_subcommand("trace", "Run a single trial and print the message trace");
    trace_cmd->add_option("config", config_path, "World config JSON file")->required();
    CLI::Option* trace_seed = trace_cmd->add_option("--seed", seed_value, "Seed override");
    trace_cmd->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            std::optional<std::uint64_t> seed;
            if (run_seed->count() > 0) {
                seed = seed_value;
            }
            return run_single(config_path, seed, out_dir, trace, false);
        }
        if (trace_cmd->parsed()) {
            std::optional<std::uint64_t> seed;
            if (trace_seed->count() > 0) {
                seed = seed_value;
            }
            return run_single(config_path, seed, out_dir, true, true);
        }
        if (validate_cmd->parsed()) {
            swarmbt::load_world_config(config_path);
            std::cout << "ok\n";
            return kExitOk;
        }
        if (study_cmd->parsed()) {
            swarmbt::StudySpec spec;
            if (auto id = swarmbt::study_from_string(study_arg)) {
                spec = swarmbt::make_preset(*id, scale, trials, study_seed);
            } else {
                spec = swarmbt::load_study_spec(study_arg);
                if (scale_opt->count() > 0) {
                    throw swarmbt::ConfigError("set scale inside the study spec file");
                }
                if (trials_opt->count() > 0) {
                    spec.trials = trials;
                }
                if (study_seed_opt->count() > 0) {
                    spec.base_seed = study_seed;
                }
            }
            swarmbt::StudyOptions opts;
            opts.out_dir = out_dir;
            opts.jobs = jobs;
            const swarmbt::StudyReport report = swarmbt::run_study(spec, opts);
            print_study_summary(report);
            std::cerr << "study written to " << (fs::path(out_dir) / spec.name).string() << '\n';
            return kExitOk;
        }
    } catch (const swarmbt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTrialBug;
    }
    return kExitUsage;
}
