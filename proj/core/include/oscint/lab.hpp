#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oscint/bounds.hpp"
#include "oscint/opnorm.hpp"

namespace oscint {

// Log-log least-squares fit of value against parameter (base-2 logs).
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double stderr_slope = 0.0;
    int excluded = 0;  // leading samples dropped as pre-asymptotic
    std::vector<std::pair<double, double>> samples;  // (parameter, value)
};

DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples);

// Refit without the two smallest parameters when the full fit is contaminated
// (R^2 below r2_floor) and enough samples remain; records the exclusion.
DecayFit fit_decay_adaptive(const std::vector<std::pair<double, double>>& samples,
                            double r2_floor = 0.99);

struct ExperimentRecord {
    std::string experiment;
    std::string model;
    int l = 0, r = 0, n = 1;
    double lambda = 0.0;
    double hbar = 0.0;  // 0 = no localization
    std::string norm_kind;
    double value = 0.0;
    double bound = 0.0;  // 0 = no bound attached
    double ratio = 0.0;  // value / bound when bound > 0
};

struct SweepOptions {
    double points_per_wavelength = 8.0;
    GridBudget budget{};
    double rel_tol = 1e-4;
};

// One record per lambda with the requested norm of the spec template
// (localization and damping taken from the template).
std::vector<ExperimentRecord> sweep_lambda(const OperatorSpec& spec_template,
                                           const std::vector<double>& lambdas,
                                           const std::string& norm_kind,
                                           const SweepOptions& opts = {});

// Shell L2 norms against the closed-form regime bounds at fixed lambda.
// Entries of hbars below lambda^{-1/2} are rejected.
std::vector<ExperimentRecord> verify_shell_l2(const PhaseModel& model, int l, int r,
                                              double lambda, const std::vector<double>& hbars,
                                              const SweepOptions& opts = {});

// L2 sweep of the damped full operator; the fitted slope is the result.
DecayFit damping_experiment(const PhaseModel& model, const std::vector<double>& lambdas,
                            const SweepOptions& opts = {});

struct ConvexityReport {
    double hbar = 0.0;
    int pairs_used = 0;
    int pairs_skipped = 0;         // degenerate draws (x == y)
    double min_gradient_ratio = 0.0;  // min |S_theta(x,.) - S_theta(y,.)| / (hbar |x-y|)
    double min_segment_h = 0.0;       // min of h along the connecting segments
};

// Samples point pairs inside one sign piece of the shell support and checks
// the gradient-separation ratio and the segment minimum of h.
ConvexityReport convexity_check(const PhaseModel& model, double hbar, int npairs,
                                std::uint64_t seed);

// Deterministic CSV/JSON serialization. The CSV carries one timestamp comment
// line; everything after it is a pure function of the records.
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
void write_csv(const std::string& path, const std::vector<ExperimentRecord>& records,
               const std::string& timestamp_comment);
void sort_records(std::vector<ExperimentRecord>& records);

}  // namespace oscint
