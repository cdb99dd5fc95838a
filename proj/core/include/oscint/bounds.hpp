#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oscint/common.hpp"

namespace oscint {

// Exact rational arithmetic for exponent algebra. Regime-boundary identities
// must hold exactly, so none of this goes through floating point.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d);

    Rational operator-() const { return {-num, den}; }
    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rational a, Rational b) { return !(a == b); }
    friend bool operator<(Rational a, Rational b);
    friend bool operator<=(Rational a, Rational b) { return a < b || a == b; }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// The four L2 bound regimes for the shell-localized operator, ordered by
// decreasing hbar. Names reflect which mechanism limits the Gram sums A, B:
//   almost_orthogonal : far blocks decay fast, A,B = O(1)
//   overlap_count     : A,B = O((lambda*hbar^3)^{-1})
//   one_sided_type    : A from the right-type support bound, B from overlap
//   two_sided_type    : both A and B from type support bounds
enum class Regime { almost_orthogonal = 0, overlap_count, one_sided_type, two_sided_type };

std::string regime_name(Regime r);

struct RegimeBound {
    Regime regime = Regime::almost_orthogonal;
    Rational lambda_exp;     // exponent of lambda in the bound
    Rational hbar_exp;       // exponent of hbar in the bound
    double value = 0.0;      // lambda^lambda_exp * hbar^hbar_exp (constant = 1)
};

// Pure exponents of the given regime's bound, as functions of n and the two
// types (k = min(l,r), K = max(l,r)).
RegimeBound shell_l2_exponents(int n, int l, int r, Regime regime);

// Regime thresholds as exponents q in hbar = lambda^{-q}: returns
// {1/3, k/(2k+1), K/(2K+1)}; the validity floor is q = 1/2.
std::array<Rational, 3> regime_thresholds(int l, int r);

// L2 bound for the shell operator at (lambda, hbar): selects the regime from
// the thresholds (ties toward the smaller regime index) and evaluates the
// bound with constant 1. Requires l,r >= 1 and hbar >= lambda^{-1/2};
// hbar > 1 falls into the widest regime.
RegimeBound shell_l2_bound(int n, int l, int r, double lambda, double hbar);

// Total lambda-exponent of a regime's bound along hbar = lambda^{-q}.
Rational exponent_on_ray(int n, int l, int r, Regime regime, Rational q);

// Loss of L2 decay for a two-sided singularity of types (l, r), and the
// conjecturally optimal profile. Both are defined at (0,0) (no singularity,
// zero loss); a half-degenerate profile is rejected.
Rational decay_loss(int l, int r);
Rational decay_loss_optimal(int l, int r);

// L1->L1 and Linf->Linf bound shapes for the localized operator:
// (hbar^{1/r}, hbar^{1/l}), constants normalized to 1.
std::pair<double, double> shell_l1_linf_bound(int l, int r, double hbar);

// L^p range in which a one-sided fold with opposite type at most r behaves
// like a nondegenerate operator, plus the interpolation exponent used inside
// the excluded range. Endpoint estimates carry an extra log factor.
struct LpRange {
    Rational p_low_end;       // (r+2)/(r+1)
    Rational p_high_end;      // 3
    Rational interp_exponent; // (4 + 2/r)^{-1}
    bool weak_endpoints = true;
};
LpRange one_sided_fold_lp_range(int r);

// Lambda-exponent of the dyadic shell sum, measured by a log-space geometric
// summation at two very large lambdas. With damping=false this reproduces
// -n/2 + decay_loss(l,r); with damping=true (each shell weighted by hbar and
// the tail cut at lambda^{-1/2}) it reproduces -n/2.
double dyadic_sum_exponent(int n, int l, int r, bool damped);

// Row of the printable regime table. The regime covers
// hbar in [lambda^{-q_max}, lambda^{-q_min}], q_min <= q_max.
struct RegimeRow {
    Regime regime;
    Rational q_min;
    Rational q_max;
    Rational lambda_exp;
    Rational hbar_exp;
};
std::vector<RegimeRow> regime_table(int n, int l, int r);

}  // namespace oscint
