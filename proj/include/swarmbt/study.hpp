#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmbt/sar.hpp"

namespace swarmbt {

enum class StudyId { ModalityCompare, CommRange, Opportunities, BufferDuration };

const char* to_string(StudyId id);
std::optional<StudyId> study_from_string(const std::string& text);

/// One cell of a study: a label (used as the output directory), the swept
/// x-value, the modality under test and the fully resolved world config
/// (seed filled per trial).
struct SweepPoint {
    std::string label;
    ModalityKind modality = ModalityKind::QRU;
    double value = 0.0;
    WorldConfig config;
};

struct StudySpec {
    StudyId id = StudyId::ModalityCompare;
    std::string name;
    int trials = 5;
    std::uint64_t base_seed = 1;
    std::vector<SweepPoint> points;
};

struct TrialSummary {
    int trial = 0;
    std::uint64_t seed = 0;
    std::int64_t stop_iteration = 0;
    bool completed = false;
    std::int64_t collected = 0;
    std::int64_t queries = 0;
    std::int64_t effective = 0;
    double eq_percent = 1.0;
    std::int64_t upd_q = 0;
    std::int64_t upd_eu = 0;
    std::int64_t upd_ebu = 0;
    std::array<std::int64_t, 5> levels{};

    std::int64_t upd_total() const { return upd_q + upd_eu + upd_ebu; }
};

struct PointReport {
    std::string label;
    ModalityKind modality = ModalityKind::QRU;
    double value = 0.0;
    std::vector<TrialSummary> trials;

    /// Extracts one metric across trials for aggregation.
    std::vector<double> metric(double (*fn)(const TrialSummary&)) const;
};

struct StudyReport {
    StudyId id = StudyId::ModalityCompare;
    std::string name;
    int trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<PointReport> points;

    const PointReport& point(const std::string& label) const;
};

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Sample mean and (n-1) standard deviation; stddev 0 for fewer than two
/// samples.
MeanStd mean_std(const std::vector<double>& values);

struct StudyOptions {
    std::string out_dir;  // empty: keep results in memory only
    int jobs = 1;         // worker threads for the trial fan-out
};

/// Runs every sweep point x trial. Trial k of any point uses seed base+k, so
/// single trials can be re-run in isolation. `jobs` changes wall time only:
/// outputs are byte-identical for any worker count.
StudyReport run_study(const StudySpec& spec, const StudyOptions& opts);

/// Serial reference runner used by tests and the benchmark to pin down the
/// jobs-invariance contract.
StudyReport run_study_serial(const StudySpec& spec, const StudyOptions& opts);

/// Study presets. scale=0.25 is the desk preset (arena 1000x1000, 19I-1M,
/// 20000 iterations, 5 trials); scale=1.0 matches the published experiment
/// parameters. Values between the anchors interpolate linearly.
StudySpec make_preset(StudyId id, double scale, int trials_override = -1,
                      std::uint64_t base_seed = 1);

/// Custom study: JSON {"study": ..., "scale": ..., "trials": ..., "seed": ...,
/// "overrides": {world-config keys applied to every point}}.
StudySpec study_spec_from_json_text(const std::string& text);
StudySpec load_study_spec(const std::string& path);

/// aggregate.csv (wide) and plotdata.csv (long) under dir. Called by
/// run_study when out_dir is set; exposed for tests.
void write_aggregates(const StudyReport& report, const std::string& dir);

}  // namespace swarmbt
