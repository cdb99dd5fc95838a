#include "oscint/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oscint {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw PreconditionError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw PreconditionError("rational division by zero");
    return {a.num * b.den, a.den * b.num};
}
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::almost_orthogonal: return "almost_orthogonal";
        case Regime::overlap_count: return "overlap_count";
        case Regime::one_sided_type: return "one_sided_type";
        case Regime::two_sided_type: return "two_sided_type";
    }
    return "?";
}

namespace {

void require_types(int l, int r) {
    if (l < 1 || r < 1) throw PreconditionError("types l, r must be >= 1");
}

void require_dim(int n) {
    if (n < 1 || n > 2) throw PreconditionError("dimension n must be 1 or 2");
}

}  // namespace

RegimeBound shell_l2_exponents(int n, int l, int r, Regime regime) {
    require_dim(n);
    require_types(l, r);
    const std::int64_t k = std::min(l, r);
    const std::int64_t K = std::max(l, r);
    RegimeBound rb;
    rb.regime = regime;
    switch (regime) {
        case Regime::almost_orthogonal:
            rb.lambda_exp = Rational(-n, 2);
            rb.hbar_exp = Rational(-1, 2);
            break;
        case Regime::overlap_count:
            rb.lambda_exp = Rational(-(n + 1), 2);
            rb.hbar_exp = Rational(-2);
            break;
        case Regime::one_sided_type:
            rb.lambda_exp = Rational(-n, 2);
            rb.hbar_exp = Rational(-1) + Rational(1, 2 * k);
            break;
        case Regime::two_sided_type:
            rb.lambda_exp = Rational(-(n - 1), 2);
            rb.hbar_exp = Rational(1, 2 * k) + Rational(1, 2 * K);
            break;
    }
    return rb;
}

std::array<Rational, 3> regime_thresholds(int l, int r) {
    require_types(l, r);
    const std::int64_t k = std::min(l, r);
    const std::int64_t K = std::max(l, r);
    return {Rational(1, 3), Rational(k, 2 * k + 1), Rational(K, 2 * K + 1)};
}

RegimeBound shell_l2_bound(int n, int l, int r, double lambda, double hbar) {
    require_dim(n);
    require_types(l, r);
    if (!(lambda > 0.0) || !(hbar > 0.0)) throw PreconditionError("lambda, hbar must be positive");
    const double ll = std::log2(lambda);
    const double lh = std::log2(hbar);
    const double slack = 1e-9 * std::max(1.0, std::abs(ll));
    if (lh < -0.5 * ll - slack) {
        throw PreconditionError("hbar below lambda^{-1/2}: outside the validity region");
    }
    const auto q = regime_thresholds(l, r);
    Regime regime = Regime::two_sided_type;
    // Ties go to the smaller regime index; hbar > 1 extends the widest regime.
    for (int i = 0; i < 3; ++i) {
        if (lh >= -q[i].value() * ll - slack) {
            regime = static_cast<Regime>(i);
            break;
        }
    }
    RegimeBound rb = shell_l2_exponents(n, l, r, regime);
    rb.value = std::exp2(rb.lambda_exp.value() * ll + rb.hbar_exp.value() * lh);
    return rb;
}

Rational exponent_on_ray(int n, int l, int r, Regime regime, Rational q) {
    RegimeBound rb = shell_l2_exponents(n, l, r, regime);
    return rb.lambda_exp - q * rb.hbar_exp;
}

Rational decay_loss(int l, int r) {
    if (l == 0 && r == 0) return Rational(0);
    if (l == 0 || r == 0) throw PreconditionError("loss undefined when exactly one type is zero");
    require_types(l, r);
    const std::int64_t k = std::min(l, r);
    const std::int64_t K = std::max(l, r);
    // 1/2 * (1 - 1/(2k)) / (1 + 1/(2K))
    return Rational(1, 2) * (Rational(1) - Rational(1, 2 * k)) / (Rational(1) + Rational(1, 2 * K));
}

Rational decay_loss_optimal(int l, int r) {
    if (l == 0 && r == 0) return Rational(0);
    if (l == 0 || r == 0) throw PreconditionError("loss undefined when exactly one type is zero");
    require_types(l, r);
    return Rational(1, 2) / (Rational(1) + Rational(1, l) + Rational(1, r));
}

std::pair<double, double> shell_l1_linf_bound(int l, int r, double hbar) {
    require_types(l, r);
    if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
    return {std::pow(hbar, 1.0 / r), std::pow(hbar, 1.0 / l)};
}

LpRange one_sided_fold_lp_range(int r) {
    if (r < 1) throw PreconditionError("type r must be >= 1");
    LpRange out;
    out.p_low_end = Rational(r + 2, r + 1);
    out.p_high_end = Rational(3);
    out.interp_exponent = Rational(r, 4 * r + 2);  // (4 + 2/r)^{-1}
    out.weak_endpoints = true;
    return out;
}

namespace {

// Regime of the dyadic shell hbar = 2^{-N} at lambda = 2^L, decided in exact
// integer arithmetic. Ties toward the smaller regime index.
Regime regime_of_shell(std::int64_t N, std::int64_t L, std::int64_t k, std::int64_t K) {
    if (3 * N <= L) return Regime::almost_orthogonal;
    if (N * (2 * k + 1) <= k * L) return Regime::overlap_count;
    if (N * (2 * K + 1) <= K * L) return Regime::one_sided_type;
    return Regime::two_sided_type;
}

// log2 of the regime bound at lambda = 2^L, hbar = 2^{-N}, exact rational.
Rational log2_bound(int n, int l, int r, Regime regime, std::int64_t L, std::int64_t N) {
    RegimeBound rb = shell_l2_exponents(n, l, r, regime);
    return rb.lambda_exp * Rational(L) - rb.hbar_exp * Rational(N);
}

// log2 of a sum of 2^{t_i}: max + log2(sum of 2^{t_i - max}).
double log2_sum(const std::vector<double>& t) {
    double m = *std::max_element(t.begin(), t.end());
    double s = 0.0;
    for (double v : t) s += std::exp2(v - m);
    return m + std::log2(s);
}

double log2_dyadic_series(int n, int l, int r, bool damped, std::int64_t L) {
    const std::int64_t k = std::min(l, r);
    const std::int64_t K = std::max(l, r);
    // Cut at hbar0 = lambda^{-K/(2K+1)} (undamped; this is where the last
    // shell regime ends) or at lambda^{-1/2} (damped). L is a multiple of
    // every threshold denominator so the cut index is exact.
    const std::int64_t Ncut = damped ? L / 2 : (K * L) / (2 * K + 1);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(Ncut) + 1);
    for (std::int64_t N = 0; N < Ncut; ++N) {
        Regime regime = regime_of_shell(N, L, k, K);
        Rational t = log2_bound(n, l, r, regime, L, N);
        if (damped) t = t - Rational(N);  // extra hbar factor on each shell
        terms.push_back(t.value());
    }
    // Bar piece at the cut, bounded by the two-sided-type estimate; the
    // damped series carries the extra factor lambda^{-1/2} = hbar0.
    Rational bar = log2_bound(n, l, r, Regime::two_sided_type, L, Ncut);
    if (damped) bar = bar - Rational(Ncut);
    terms.push_back(bar.value());
    return log2_sum(terms);
}

}  // namespace

double dyadic_sum_exponent(int n, int l, int r, bool damped) {
    require_dim(n);
    require_types(l, r);
    // L is a common multiple of 2, 3 and 2m+1 for m <= 6, so every regime
    // boundary falls on a dyadic index for both lambdas and the term
    // structure repeats exactly; the measured slope is then free of boundary
    // misalignment effects.
    if (std::min(l, r) > 6 || std::max(l, r) > 6) {
        throw PreconditionError("dyadic_sum_exponent supports types up to 6");
    }
    const std::int64_t L = 90090;
    double v1 = log2_dyadic_series(n, l, r, damped, L);
    double v2 = log2_dyadic_series(n, l, r, damped, 2 * L);
    return (v2 - v1) / static_cast<double>(L);
}

std::vector<RegimeRow> regime_table(int n, int l, int r) {
    require_dim(n);
    require_types(l, r);
    const auto q = regime_thresholds(l, r);
    std::vector<RegimeRow> rows;
    Rational lo(0);
    for (int i = 0; i < 3; ++i) {
        RegimeBound rb = shell_l2_exponents(n, l, r, static_cast<Regime>(i));
        rows.push_back({static_cast<Regime>(i), lo, q[i], rb.lambda_exp, rb.hbar_exp});
        lo = q[i];
    }
    RegimeBound rb = shell_l2_exponents(n, l, r, Regime::two_sided_type);
    rows.push_back({Regime::two_sided_type, lo, Rational(1, 2), rb.lambda_exp, rb.hbar_exp});
    return rows;
}

}  // namespace oscint
