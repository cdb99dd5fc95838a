#include "oscint/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "oscint/cutoffs.hpp"

namespace oscint {

DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 4) throw FitError("need at least 4 samples for a decay fit");
    const std::size_t n = samples.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(samples[i].second > 0.0)) throw FitError("decay fit needs positive values");
        if (!(samples[i].first > 0.0)) throw FitError("decay fit needs positive parameters");
        xs[i] = std::log2(samples[i].first);
        ys[i] = std::log2(samples[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw FitError("decay fit needs at least two distinct parameters");
    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.stderr_slope = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    fit.samples = samples;
    return fit;
}

DecayFit fit_decay_adaptive(const std::vector<std::pair<double, double>>& samples,
                            double r2_floor) {
    DecayFit full = fit_decay(samples);
    if (full.r2 >= r2_floor || samples.size() < 6) return full;
    std::vector<std::pair<double, double>> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> tail(sorted.begin() + 2, sorted.end());
    DecayFit trimmed = fit_decay(tail);
    trimmed.excluded = 2;
    return trimmed;
}

namespace {

double measure_norm(const DiscretizedOperator& op, const std::string& kind, double rel_tol) {
    if (kind == "l2") return l2_norm(op, rel_tol);
    if (kind == "l1") return l1_norm(op);
    if (kind == "linf") return linf_norm(op);
    if (kind == "schur") return schur_bound(op);
    throw PreconditionError("unknown norm kind '" + kind + "'");
}

ExperimentRecord base_record(const OperatorSpec& spec) {
    ExperimentRecord rec;
    rec.model = spec.model.name();
    rec.l = spec.model.left_type_hint();
    rec.r = spec.model.right_type_hint();
    rec.n = spec.model.dim();
    rec.lambda = spec.lambda;
    rec.hbar = spec.loc.kind == LocKind::full ? 0.0 : spec.loc.hbar;
    return rec;
}

}  // namespace

std::vector<ExperimentRecord> sweep_lambda(const OperatorSpec& spec_template,
                                           const std::vector<double>& lambdas,
                                           const std::string& norm_kind,
                                           const SweepOptions& opts) {
    std::vector<ExperimentRecord> out;
    for (double lambda : lambdas) {
        OperatorSpec spec = spec_template;
        spec.lambda = lambda;
        const DiscretizedOperator op = discretize(spec, opts.points_per_wavelength, opts.budget);
        ExperimentRecord rec = base_record(spec);
        rec.experiment = "sweep";
        rec.norm_kind = norm_kind;
        rec.value = measure_norm(op, norm_kind, opts.rel_tol);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ExperimentRecord> verify_shell_l2(const PhaseModel& model, int l, int r,
                                              double lambda, const std::vector<double>& hbars,
                                              const SweepOptions& opts) {
    const double floor_hbar = 1.0 / std::sqrt(lambda);
    std::vector<ExperimentRecord> out;
    for (double hbar : hbars) {
        if (hbar < floor_hbar * (1.0 - 1e-9)) {
            throw PreconditionError("hbar below lambda^{-1/2} rejected by the L2 theory");
        }
        OperatorSpec spec{model, lambda, Localization::shell(hbar, +1), false};
        const DiscretizedOperator op = discretize(spec, opts.points_per_wavelength, opts.budget);
        ExperimentRecord rec = base_record(spec);
        rec.experiment = "theorem11";
        rec.l = l;
        rec.r = r;
        rec.norm_kind = "l2";
        rec.value = l2_norm(op, opts.rel_tol);
        rec.bound = shell_l2_bound(model.dim(), l, r, lambda, hbar).value;
        rec.ratio = rec.value / rec.bound;
        out.push_back(std::move(rec));
    }
    // Bar piece at the validity floor, against the two-sided-type estimate.
    {
        OperatorSpec spec{model, lambda, Localization::bar(floor_hbar), false};
        const DiscretizedOperator op = discretize(spec, opts.points_per_wavelength, opts.budget);
        ExperimentRecord rec = base_record(spec);
        rec.experiment = "theorem11";
        rec.l = l;
        rec.r = r;
        rec.norm_kind = "l2_bar";
        rec.value = l2_norm(op, opts.rel_tol);
        rec.bound = shell_l2_bound(model.dim(), l, r, lambda, floor_hbar).value;
        rec.ratio = rec.value / rec.bound;
        out.push_back(std::move(rec));
    }
    return out;
}

DecayFit damping_experiment(const PhaseModel& model, const std::vector<double>& lambdas,
                            const SweepOptions& opts) {
    OperatorSpec spec{model, 1.0, Localization::full(), true};
    const auto records = sweep_lambda(spec, lambdas, "l2", opts);
    std::vector<std::pair<double, double>> samples;
    for (const auto& rec : records) samples.emplace_back(rec.lambda, rec.value);
    return fit_decay_adaptive(samples);
}

ConvexityReport convexity_check(const PhaseModel& model, double hbar, int npairs,
                                std::uint64_t seed) {
    if (model.dim() != 1) throw PreconditionError("convexity sampling supports n = 1 models");
    if (!(hbar > 0.0 && hbar <= 1.0)) throw PreconditionError("hbar must be in (0, 1]");
    const int r = std::max(1, model.right_type_hint());
    std::mt19937_64 rng(seed);
    const Interval xi = model.domain().x[0];
    const Interval ti = model.domain().theta[0];
    std::uniform_real_distribution<double> ux(xi.lo, xi.hi);
    std::uniform_real_distribution<double> ut(ti.lo, ti.hi);

    auto on_shell = [&](const Point& p) {
        return model.amplitude(p) > 0.0 && shell_weight(model.h(p) / hbar) > 0.0;
    };

    ConvexityReport rep;
    rep.hbar = hbar;
    rep.min_gradient_ratio = std::numeric_limits<double>::infinity();
    rep.min_segment_h = std::numeric_limits<double>::infinity();
    long attempts = 0;
    const long max_attempts = static_cast<long>(npairs) * 200000L;
    while (rep.pairs_used < npairs) {
        if (++attempts > max_attempts) {
            throw PreconditionError("could not sample enough pairs on the shell support");
        }
        Point p;
        p.theta[0] = ut(rng);
        p.x[0] = ux(rng);
        if (!on_shell(p)) continue;
        // Sign pattern of the first point pins the piece.
        std::vector<int> pattern(static_cast<std::size_t>(r - 1));
        for (int j = 1; j < r; ++j) {
            pattern[static_cast<std::size_t>(j - 1)] =
                iterated_field_h(model, p, j, Side::right) >= 0.0 ? 1 : -1;
        }
        Point q = p;
        bool found = false;
        for (int tries = 0; tries < 2000; ++tries) {
            ++attempts;
            q.x[0] = ux(rng);
            if (!on_shell(q)) continue;
            bool compatible = true;
            for (int j = 1; j < r; ++j) {
                const double v = iterated_field_h(model, q, j, Side::right);
                if (pattern[static_cast<std::size_t>(j - 1)] * v <= -hbar) {
                    compatible = false;
                    break;
                }
            }
            if (compatible) {
                found = true;
                break;
            }
        }
        if (!found) continue;
        const double dx = std::abs(p.x[0] - q.x[0]);
        if (dx < 1e-12) {
            ++rep.pairs_skipped;
            continue;
        }
        const double sp = model.phase_derivative(p, {0, 0}, {1, 0});
        const double sq = model.phase_derivative(q, {0, 0}, {1, 0});
        rep.min_gradient_ratio = std::min(rep.min_gradient_ratio, std::abs(sp - sq) / (hbar * dx));
        Segment seg;
        seg.x_start = {std::min(p.x[0], q.x[0]), 0.0};
        seg.theta = p.theta;
        seg.t_length = dx;
        const SampledFunction h_on_seg = h_along_segment(model, seg, 0, Side::right, 65);
        for (double v : h_on_seg.value) rep.min_segment_h = std::min(rep.min_segment_h, v);
        ++rep.pairs_used;
    }
    return rep;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void sort_records(std::vector<ExperimentRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        auto key = [](const ExperimentRecord& r) {
            return std::tie(r.experiment, r.model, r.norm_kind, r.lambda, r.hbar);
        };
        return key(a) < key(b);
    });
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = "experiment,model,l,r,n,lambda,hbar,norm_kind,value,bound,ratio\n";
    for (const auto& rec : records) {
        out += rec.experiment + "," + rec.model + "," + std::to_string(rec.l) + "," +
               std::to_string(rec.r) + "," + std::to_string(rec.n) + "," + fmt(rec.lambda) + "," +
               fmt(rec.hbar) + "," + rec.norm_kind + "," + fmt(rec.value) + ",";
        if (rec.bound > 0.0) {
            out += fmt(rec.bound) + "," + fmt(rec.ratio);
        } else {
            out += ",";
        }
        out += "\n";
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<ExperimentRecord>& records,
               const std::string& timestamp_comment) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << "# " << timestamp_comment << "\n";
    f << records_to_csv(records);
}

}  // namespace oscint
