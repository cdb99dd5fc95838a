#pragma once

#include <vector>

#include "oscint/common.hpp"
#include "oscint/phase.hpp"

namespace oscint {

// Smooth even plateau function: 1 on [-a, a], 0 outside (-b, b), monotone in
// between, built from the exp(-1/t) transition. All evaluators clamp the
// exponential underflow to exact 0/1 at the support edges.
class Bump {
  public:
    Bump(double inner, double outer);

    double operator()(double t) const;
    double inner() const { return a_; }
    double outer() const { return b_; }

  private:
    double a_;
    double b_;
};

Bump make_bump(double inner, double outer);

// Smooth monotone step: 0 for u <= 0, 1 for u >= 1, with step(u) + step(1-u) = 1.
double smooth_step(double u);

// Shell cutoff beta, supported in [1/2, 2] (one-sided: beta = 0 for t <= 0),
// and the bar cutoff: 1 on [-1, 1], supported in [-2, 2]. They satisfy the
// telescoping relation bar(t) + sum_{j=1..J} [beta(2^-j t) + beta(-2^-j t)]
// = bar(2^-J t).
double shell_weight(double t);
double bar_weight(double t);

struct DyadicWeights {
    double bar = 0.0;                // bar(t)
    std::vector<double> beta;        // beta(2^-j t) + beta(-2^-j t), j = 1..J
    double total() const;
};
DyadicWeights dyadic_weights(double t, int J);

// Sign-transition function rho: smooth, supported in [-1, inf), with
// rho(t) + rho(-t) = 1 and transition inside [-1, 1].
double sign_transition(double t);

// One sign pattern of the partition refining the shell support by the signs
// of K^j h, j = 1 .. m-1, where m is the type on the chosen side.
struct SignPattern {
    Side side = Side::right;
    std::vector<int> signs;  // each +1 or -1; length = type - 1
};

// Product of sign transitions rho(hbar^{-1} sigma_j K^j h(p)) over the
// pattern. Summing over all 2^{m-1} patterns of a side gives 1.
double sign_weight(const PhaseModel& model, const Point& p, double hbar,
                   const SignPattern& pattern);

std::vector<SignPattern> all_sign_patterns(Side side, int type);

// Normalized window function chi: smooth, supported in (-1, 1), whose integer
// translates sum to 1 (a bump divided by its own periodization).
double window_fn(double t);

// Lattice index of one fine window; for the right side the window localizes
// (S_theta', x_n), for the left side (S_x', theta_n).
struct BlockIndex {
    std::array<int, 2> idx{0, 0};  // primed components first, n-th last; n=1 uses idx[0]
};

double fine_window(const PhaseModel& model, const Point& p, double hbar,
                   const BlockIndex& index, Side side);

// Integer range [lo, hi] of window indices that can meet [t_min, t_max] after
// scaling by hbar^{-1}.
std::pair<int, int> window_index_range(double t_min, double t_max, double hbar);

}  // namespace oscint
