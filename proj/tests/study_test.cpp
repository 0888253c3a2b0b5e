#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "swarmbt/study.hpp"

using namespace swarmbt;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

StudySpec tiny_study() {
    StudySpec spec = make_preset(StudyId::ModalityCompare, 0.25, 2, 7);
    for (SweepPoint& point : spec.points) {
        point.config.iterations = 600;
        point.config.arena_x = 400;
        point.config.arena_y = 400;
        point.config.zone_radius = 50;
        point.config.comm_range = 80;
        point.config.target_counts = {2, 2, 0, 0};
        point.config.roster = {RosterGroup{point.modality, PriorClass::I, 4},
                               RosterGroup{point.modality, PriorClass::M, 1}};
    }
    return spec;
}

}  // namespace

TEST_CASE("presets cover the published studies") {
    const StudySpec modality = make_preset(StudyId::ModalityCompare, 0.25);
    CHECK(modality.points.size() == 4);
    CHECK(modality.trials == 5);
    CHECK(modality.points[0].config.arena_x == doctest::Approx(1000));
    CHECK(modality.points[0].config.iterations == 20000);
    CHECK(modality.points[0].config.comm_range == doctest::Approx(100));
    CHECK(modality.points[0].config.total_robots() == 20);
    CHECK(modality.points[0].config.target_counts[0] == 10);

    const StudySpec range = make_preset(StudyId::CommRange, 0.25);
    CHECK(range.points.size() == 20);  // 5 ranges x 4 modalities
    CHECK(range.points.front().config.comm_range == doctest::Approx(50));
    CHECK(range.points.back().config.comm_range == doctest::Approx(500));

    const StudySpec opps = make_preset(StudyId::Opportunities, 0.25);
    CHECK(opps.points.size() == 12);  // 4 counts x {QRU, EU, EBU}

    const StudySpec buffer = make_preset(StudyId::BufferDuration, 0.25);
    CHECK(buffer.points.size() == 5);
    for (const SweepPoint& point : buffer.points) {
        CHECK(point.modality == ModalityKind::EBU);
    }
    CHECK(buffer.points.front().config.buffer_duration == 100);
    CHECK(buffer.points.back().config.buffer_duration == 2500);

    // The paper-scale anchor restores the published parameters.
    const StudySpec paper = make_preset(StudyId::ModalityCompare, 1.0);
    CHECK(paper.points[0].config.arena_x == doctest::Approx(2000));
    CHECK(paper.points[0].config.iterations == 100000);
    CHECK(paper.points[0].config.comm_range == doctest::Approx(200));
    CHECK(paper.points[0].config.total_robots() == 40);
    CHECK(paper.points[0].config.target_counts[0] == 25);
    CHECK(paper.trials == 20);
    const StudySpec paper_buffer = make_preset(StudyId::BufferDuration, 1.0);
    CHECK(paper_buffer.points.size() == 7);
    CHECK(paper_buffer.points.back().config.buffer_duration == 15000);
}

TEST_CASE("trial seeds derive from base+k and trials re-run in isolation") {
    const StudySpec spec = tiny_study();
    const StudyReport report = run_study_serial(spec, StudyOptions{});

    for (const PointReport& point : report.points) {
        REQUIRE(point.trials.size() == 2);
        CHECK(point.trials[0].seed == 7);
        CHECK(point.trials[1].seed == 8);
    }

    // Re-running one trial standalone gives the same summary numbers.
    WorldConfig cfg = spec.points[1].config;
    cfg.seed = 8;
    const MetricsLedger ledger = run_trial(cfg);
    const TrialSummary& from_study = report.points[1].trials[1];
    CHECK(ledger.stop_iteration == from_study.stop_iteration);
    CHECK(ledger.totals().queries == from_study.queries);
    CHECK(ledger.totals().upd_q == from_study.upd_q);
    CHECK(ledger.collected_final == from_study.collected);
}

TEST_CASE("worker count changes wall time only, never an output byte") {
    const StudySpec spec = tiny_study();
    const fs::path root = fs::temp_directory_path() / "swarmbt_study_test";
    fs::remove_all(root);

    StudyOptions serial_opts;
    serial_opts.out_dir = (root / "serial").string();
    serial_opts.jobs = 1;
    run_study_serial(spec, serial_opts);

    StudyOptions parallel_opts;
    parallel_opts.out_dir = (root / "parallel").string();
    parallel_opts.jobs = 4;
    run_study(spec, parallel_opts);

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "serial")) {
        if (!entry.is_regular_file()) {
            continue;
        }
        ++files;
        const fs::path rel = fs::relative(entry.path(), root / "serial");
        CHECK(slurp(entry.path()) == slurp(root / "parallel" / rel));
    }
    // 4 points x 2 trials x (csv + summary) + aggregate + plotdata
    CHECK(files == 18);
    fs::remove_all(root);
}

TEST_CASE("study output layout") {
    StudySpec spec = tiny_study();
    spec.trials = 1;
    const fs::path root = fs::temp_directory_path() / "swarmbt_layout_test";
    fs::remove_all(root);

    StudyOptions opts;
    opts.out_dir = root.string();
    run_study(spec, opts);

    CHECK(fs::exists(root / "modality-compare" / "QRA" / "0.csv"));
    CHECK(fs::exists(root / "modality-compare" / "EBU" / "0.summary.json"));
    CHECK(fs::exists(root / "modality-compare" / "aggregate.csv"));
    CHECK(fs::exists(root / "modality-compare" / "plotdata.csv"));

    const std::string aggregate = slurp(root / "modality-compare" / "aggregate.csv");
    CHECK(aggregate.find("modality-compare,QRA") != std::string::npos);
    CHECK(aggregate.find("eq_percent_mean") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("custom study specs parse with overrides") {
    const StudySpec spec = study_spec_from_json_text(R"({
        "study": "buffer-duration",
        "trials": 2,
        "seed": 5,
        "overrides": {"iterations": 1234, "comm_range": 77.5}
    })");
    CHECK(spec.id == StudyId::BufferDuration);
    CHECK(spec.trials == 2);
    CHECK(spec.base_seed == 5);
    for (const SweepPoint& point : spec.points) {
        CHECK(point.config.iterations == 1234);
        CHECK(point.config.comm_range == doctest::Approx(77.5));
    }

    CHECK_THROWS_AS(study_spec_from_json_text(R"({"study": "nope"})"), ConfigError);
    CHECK_THROWS_AS(study_spec_from_json_text(R"({"study": "comm-range", "bogus": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(
        study_spec_from_json_text(R"({"study": "comm-range", "overrides": {"bogus": 1}})"),
        ConfigError);
}

TEST_CASE("config schema rejects unknown keys with a field path") {
    try {
        world_config_from_json_text(R"({"roster": [{"modality": "QRU", "count": 1}], "nope": 3})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("$.nope") != std::string::npos);
    }
    try {
        world_config_from_json_text(R"({"roster": [{"modality": "XRU", "count": 1}]})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("$.roster[0].modality") != std::string::npos);
    }
    CHECK_THROWS_AS(world_config_from_json_text("not json"), ConfigError);

    // The canonical echo of a parsed config re-validates.
    const WorldConfig cfg = world_config_from_json_text(
        R"({"roster": [{"modality": "EU", "prior": "M", "count": 2}], "iterations": 10})");
    CHECK_NOTHROW(world_config_from_json_text(world_config_to_json_text(cfg)));
}
