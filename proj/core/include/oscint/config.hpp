#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oscint/common.hpp"

namespace oscint {

// Config for one experiment run. Parsed from JSON; unknown keys are rejected
// so typos fail loudly. Defaults are what `oscint run --help` documents.
struct RunConfig {
    struct Model {
        std::string name = "fold2";
        int l = 1;
        int r = 1;
        int n = 1;
    } model;

    std::vector<double> lambdas = {32, 64, 128, 256, 512, 1024};

    struct HbarRange {
        int j_min = 1;  // hbar = 2^{-j}, j from j_min ...
        int j_max = 6;  // ... to j_max
    } hbar;

    struct Grid {
        double points_per_wavelength = 8.0;
        int max_points = 16384;  // per-axis cap
    } grid;

    std::vector<std::string> norms = {"l2"};
    std::vector<std::string> experiments = {"sweep"};
    std::string output = "results";
    std::uint64_t seed = 12345;
    int threads = 0;  // 0 = automatic
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);  // canonical echo

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string note;
};

struct FitSummary {
    std::string experiment;
    std::string norm_kind;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
    int excluded = 0;
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct RunOutcome {
    std::vector<CheckResult> checks;
    std::vector<FitSummary> fits;
    std::string csv_path;
    std::string summary_path;

    bool pass() const;
};

// Runs the configured experiments, writes results.csv and summary.json under
// the output directory (or out_override when nonempty).
RunOutcome run_experiments(const RunConfig& cfg, const std::string& out_override = "");

}  // namespace oscint
