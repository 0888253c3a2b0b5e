// Compares the serial study runner against the OpenMP trial fan-out on a
// small modality study and checks the outputs are byte-identical.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swarmbt/study.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool same_outputs(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> rel;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.is_regular_file()) {
            rel.push_back(fs::relative(entry.path(), a));
        }
    }
    for (const fs::path& r : rel) {
        if (slurp(a / r) != slurp(b / r)) {
            std::fprintf(stderr, "mismatch: %s\n", r.string().c_str());
            return false;
        }
    }
    return !rel.empty();
}

double run_once(const swarmbt::StudySpec& spec, const std::string& out_dir, int jobs) {
    swarmbt::StudyOptions opts;
    opts.out_dir = out_dir;
    opts.jobs = jobs;
    const auto start = std::chrono::steady_clock::now();
    if (jobs <= 1) {
        swarmbt::run_study_serial(spec, opts);
    } else {
        swarmbt::run_study(spec, opts);
    }
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    int jobs = 2;
    if (argc > 1) {
        jobs = std::atoi(argv[1]);
    }

    swarmbt::StudySpec spec = swarmbt::make_preset(swarmbt::StudyId::ModalityCompare, 0.25, 3, 11);
    for (swarmbt::SweepPoint& point : spec.points) {
        point.config.iterations = 4000;
    }

    const fs::path root = fs::temp_directory_path() / "swarmbt_bench";
    fs::remove_all(root);

    const double serial = run_once(spec, (root / "serial").string(), 1);
    const double parallel = run_once(spec, (root / "parallel").string(), jobs);

    std::printf("serial:   %.3f s\n", serial);
    std::printf("jobs=%d:   %.3f s  (speedup %.2fx)\n", jobs, parallel,
                parallel > 0 ? serial / parallel : 0.0);

    if (!same_outputs(root / "serial" / spec.name, root / "parallel" / spec.name)) {
        std::fprintf(stderr, "FAIL: parallel outputs differ from serial reference\n");
        return 1;
    }
    std::printf("outputs byte-identical across worker counts\n");
    return 0;
}
