#include "oscint/cutoffs.hpp"

#include <cmath>

namespace oscint {

namespace {

// exp(-1/t) continued by 0; underflow clamps keep the tails exactly 0.
double transition_kernel(double t) {
    if (t <= 0.0) return 0.0;
    if (t < 1.4e-3) return 0.0;  // exp(-1/t) < 1e-310, below double range
    return std::exp(-1.0 / t);
}

}  // namespace

double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = transition_kernel(u);
    const double b = transition_kernel(1.0 - u);
    return a / (a + b);
}

Bump::Bump(double inner, double outer) : a_(inner), b_(outer) {
    if (!(inner > 0.0) || !(outer > inner)) {
        throw PreconditionError("bump radii must satisfy 0 < inner < outer");
    }
}

double Bump::operator()(double t) const {
    const double d = std::abs(t);
    if (d <= a_) return 1.0;
    if (d >= b_) return 0.0;
    return smooth_step((b_ - d) / (b_ - a_));
}

Bump make_bump(double inner, double outer) { return Bump(inner, outer); }

namespace {
const Bump& unit_bar() {
    static const Bump b(1.0, 2.0);
    return b;
}
}  // namespace

double bar_weight(double t) { return unit_bar()(t); }

double shell_weight(double t) {
    if (t <= 0.0) return 0.0;
    return unit_bar()(t) - unit_bar()(2.0 * t);
}

double DyadicWeights::total() const {
    double s = bar;
    for (double b : beta) s += b;
    return s;
}

DyadicWeights dyadic_weights(double t, int J) {
    if (J < 1) throw PreconditionError("J must be >= 1");
    DyadicWeights w;
    w.bar = bar_weight(t);
    w.beta.resize(static_cast<std::size_t>(J));
    double s = t;
    for (int j = 1; j <= J; ++j) {
        s *= 0.5;  // s = 2^{-j} t
        w.beta[static_cast<std::size_t>(j - 1)] = shell_weight(s) + shell_weight(-s);
    }
    return w;
}

double sign_transition(double t) { return smooth_step(0.5 * (t + 1.0)); }

double sign_weight(const PhaseModel& model, const Point& p, double hbar,
                   const SignPattern& pattern) {
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
    double w = 1.0;
    for (std::size_t j = 0; j < pattern.signs.size(); ++j) {
        const double kjh = iterated_field_h(model, p, static_cast<int>(j) + 1, pattern.side);
        w *= sign_transition(pattern.signs[j] * kjh / hbar);
        if (w == 0.0) break;
    }
    return w;
}

std::vector<SignPattern> all_sign_patterns(Side side, int type) {
    if (type < 1) throw PreconditionError("type must be >= 1");
    const int m = type - 1;
    std::vector<SignPattern> out;
    out.reserve(static_cast<std::size_t>(1) << m);
    for (int mask = 0; mask < (1 << m); ++mask) {
        SignPattern p;
        p.side = side;
        p.signs.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) p.signs[static_cast<std::size_t>(j)] = (mask >> j) & 1 ? 1 : -1;
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

const Bump& window_core() {
    static const Bump b(0.25, 1.0);
    return b;
}

// Periodization over the (at most three) integer shifts that can reach t.
double window_periodization(double t) {
    const double f = std::floor(t);
    double s = 0.0;
    for (int k = -1; k <= 2; ++k) s += window_core()(t - (f + k));
    return s;
}

}  // namespace

double window_fn(double t) {
    const double c = window_core()(t);
    if (c == 0.0) return 0.0;
    return c / window_periodization(t);
}

double fine_window(const PhaseModel& model, const Point& p, double hbar,
                   const BlockIndex& index, Side side) {
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
    const double inv = 1.0 / hbar;
    if (model.dim() == 1) {
        const double t = (side == Side::right) ? p.x[0] : p.theta[0];
        return window_fn(inv * t - index.idx[0]);
    }
    // primed slot: S_{theta'} (right) or S_{x'} (left); last slot: x_n or theta_n
    double primed, last;
    if (side == Side::right) {
        primed = model.phase_derivative(p, {0, 0}, {1, 0});
        last = p.x[1];
    } else {
        primed = model.phase_derivative(p, {1, 0}, {0, 0});
        last = p.theta[1];
    }
    return window_fn(inv * primed - index.idx[0]) * window_fn(inv * last - index.idx[1]);
}

std::pair<int, int> window_index_range(double t_min, double t_max, double hbar) {
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
    const int lo = static_cast<int>(std::ceil(t_min / hbar - 1.0));
    const int hi = static_cast<int>(std::floor(t_max / hbar + 1.0));
    return {lo, hi};
}

}  // namespace oscint
