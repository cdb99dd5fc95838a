#include "oscint/sublevel.hpp"

#include <algorithm>
#include <cmath>

namespace oscint {

Poly1::Poly1(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Poly1::eval(double t, int order) const {
    // Horner on the order-th derivative coefficients.
    const int n = static_cast<int>(coeffs_.size());
    if (order >= n) return 0.0;
    double acc = 0.0;
    for (int k = n - 1; k >= order; --k) {
        double c = coeffs_[static_cast<std::size_t>(k)];
        for (int m = 0; m < order; ++m) c *= (k - m);
        acc = acc * t + c;
    }
    return acc;
}

Func1D Poly1::fn() const {
    Poly1 copy = *this;
    return [copy](double t, int order) { return copy.eval(t, order); };
}

namespace {

constexpr double kRootTol = 1e-13;

double bisect_root(const std::function<double(double)>& f, double a, double b, double fa) {
    double tol = kRootTol * std::max(1.0, std::abs(a) + std::abs(b));
    while (b - a > tol) {
        double mid = 0.5 * (a + b);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fa * fm < 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

int interior_sign(const Func1D& h, const Interval& I, int order) {
    // Sign of a monotone derivative on the piece; read where it is largest in
    // magnitude to dodge a root sitting exactly at one endpoint.
    double va = h(I.lo, order);
    double vb = h(I.hi, order);
    double v = std::abs(va) >= std::abs(vb) ? va : vb;
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 1;  // identically ~0 piece; either sign closure is valid
}

void split_recursive(const Func1D& h, Interval I, int level, std::vector<int>& signs,
                     std::vector<SignedInterval>& out) {
    if (I.length() < 0.0) return;
    if (level == 0) {
        SignedInterval si;
        si.interval = I;
        si.signs.assign(signs.rbegin(), signs.rend());  // stored as j = 1..r-1
        out.push_back(std::move(si));
        return;
    }
    auto f = [&](double t) { return h(t, level); };
    const double fa = f(I.lo);
    const double fb = f(I.hi);
    if (fa * fb < 0.0) {
        const double root = bisect_root(f, I.lo, I.hi, fa);
        Interval left{I.lo, root}, right{root, I.hi};
        signs.push_back(fa > 0.0 ? 1 : -1);
        split_recursive(h, left, level - 1, signs, out);
        signs.back() = fb > 0.0 ? 1 : -1;
        split_recursive(h, right, level - 1, signs, out);
        signs.pop_back();
    } else {
        signs.push_back(interior_sign(h, I, level));
        split_recursive(h, I, level - 1, signs, out);
        signs.pop_back();
    }
}

void spot_check_top_derivative(const Func1D& h, const Interval& I, int r) {
    const int probes = 101;
    double first = h(I.lo, r);
    for (int i = 0; i < probes; ++i) {
        double t = I.lo + I.length() * i / (probes - 1);
        double v = h(t, r);
        if (v == 0.0 || v * first < 0.0) {
            throw PreconditionError("h^{(r)} vanishes or changes sign on the interval");
        }
    }
}

}  // namespace

std::vector<SignedInterval> sign_intervals(const Func1D& h, Interval I, int r) {
    if (r < 1) throw PreconditionError("type r must be >= 1");
    if (!(I.hi >= I.lo)) throw PreconditionError("empty interval");
    spot_check_top_derivative(h, I, r);
    std::vector<SignedInterval> out;
    std::vector<int> signs;
    split_recursive(h, I, r - 1, signs, out);
    return out;
}

SublevelResult sublevel_set(const Func1D& h, Interval I, double hbar, int r, double kappa) {
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
    if (!(kappa > 0.0)) throw PreconditionError("kappa must be positive");
    SublevelResult res;
    res.hbar = hbar;
    res.r = r;
    res.kappa = kappa;
    for (const SignedInterval& piece : sign_intervals(h, I, r)) {
        const Interval& J = piece.interval;
        if (!(J.length() > 0.0)) continue;
        auto f = [&](double t) { return h(t, 0); };
        double va = f(J.lo);
        double vb = f(J.hi);
        // h is monotone on every sign piece; orient so it increases.
        bool increasing = vb >= va;
        double lo_val = increasing ? va : vb;
        double hi_val = increasing ? vb : va;
        if (lo_val >= hbar || hi_val <= -hbar) continue;  // entirely outside
        double t_at_lo_val = increasing ? J.lo : J.hi;
        double t_at_hi_val = increasing ? J.hi : J.lo;
        double t_enter = t_at_lo_val;
        if (lo_val <= -hbar) {
            auto g = [&](double t) { return f(t) + hbar; };
            t_enter = bisect_root(g, J.lo, J.hi, g(J.lo));
        }
        double t_exit = t_at_hi_val;
        if (hi_val >= hbar) {
            auto g = [&](double t) { return f(t) - hbar; };
            t_exit = bisect_root(g, J.lo, J.hi, g(J.lo));
        }
        Interval K{std::min(t_enter, t_exit), std::max(t_enter, t_exit)};
        if (K.length() <= 0.0) continue;
        res.pieces.push_back({K, piece.signs});
    }
    return res;
}

double SublevelResult::measure() const {
    double s = 0.0;
    for (const auto& p : pieces) s += p.interval.length();
    return s;
}

double SublevelResult::max_length() const {
    double s = 0.0;
    for (const auto& p : pieces) s = std::max(s, p.interval.length());
    return s;
}

double sublevel_bound(int r, double kappa, double hbar) {
    if (r < 1 || !(kappa > 0.0) || !(hbar > 0.0)) {
        throw PreconditionError("sublevel_bound needs r >= 1, kappa > 0, hbar > 0");
    }
    double rfact = 1.0;
    for (int i = 2; i <= r; ++i) rfact *= i;
    return std::pow(2.0 * rfact / kappa, 1.0 / r) * std::pow(hbar, 1.0 / r);
}

double certify_kappa(const Func1D& h, Interval I, int r, int grid) {
    if (grid < 2) throw PreconditionError("grid too small");
    const double dt = I.length() / (grid - 1);
    double best = std::numeric_limits<double>::infinity();
    double best_t = I.lo;
    double max_slope = 0.0;
    for (int i = 0; i < grid; ++i) {
        double t = I.lo + dt * i;
        double v = std::abs(h(t, r));
        max_slope = std::max(max_slope, std::abs(h(t, r + 1)));
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    // One Newton step toward a stationary point of h^{(r)}.
    double d1 = h(best_t, r + 1);
    double d2 = h(best_t, r + 2);
    if (d2 != 0.0) {
        double t = best_t - d1 / d2;
        if (I.contains(t)) best = std::min(best, std::abs(h(t, r)));
    }
    double certified = best - 0.5 * dt * max_slope;
    return certified > 0.0 ? certified : 0.0;
}

double sublevel_measure_oracle(const Func1D& h, Interval I, double hbar, int samples) {
    if (samples < 1) throw PreconditionError("need at least one sample");
    const double dt = I.length() / samples;
    long hits = 0;
    for (int i = 0; i < samples; ++i) {
        double t = I.lo + dt * (i + 0.5);
        if (std::abs(h(t, 0)) < hbar) ++hits;
    }
    return hits * dt;
}

}  // namespace oscint
