#pragma once

#include <functional>
#include <vector>

#include "oscint/common.hpp"

namespace oscint {

// 1-d smooth function presented with its derivatives: f(t, order).
using Func1D = std::function<double(double, int)>;

// Dense-coefficient polynomial; the random test corpus and the CLI demo
// feed these into the sublevel machinery.
class Poly1 {
  public:
    Poly1() = default;
    explicit Poly1(std::vector<double> coeffs);  // c0 + c1 t + c2 t^2 + ...

    double eval(double t, int order = 0) const;
    Func1D fn() const;
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }

  private:
    std::vector<double> coeffs_;
};

struct SignedInterval {
    Interval interval;
    std::vector<int> signs;  // sign of h^{(j)} on the piece, j = 1 .. r-1
};

// Splits I into the connected pieces on which each derivative h^{(j)}, j < r,
// keeps a fixed sign. |h^{(r)}| must stay positive on I (spot-checked); the
// monotonicity cascade then makes every piece a single interval and there are
// at most 2^{r-1} of them.
std::vector<SignedInterval> sign_intervals(const Func1D& h, Interval I, int r);

struct SublevelResult {
    std::vector<SignedInterval> pieces;  // sign pieces intersected with {|h| < hbar}
    double hbar = 0.0;
    int r = 1;
    double kappa = 0.0;

    double measure() const;
    double max_length() const;
};

// {t in I : |h(t)| < hbar} as at most 2^{r-1} intervals, each of length at
// most sublevel_bound(r, kappa, hbar). kappa is the caller-certified lower
// bound for |h^{(r)}| on I.
SublevelResult sublevel_set(const Func1D& h, Interval I, double hbar, int r, double kappa);

// (2 r! / kappa)^{1/r} hbar^{1/r}
double sublevel_bound(int r, double kappa, double hbar);

// Certified lower bound for |h^{(r)}| on I: grid minimization, one Newton
// polish, then shrunk by the grid-resolution defect. Returns 0 when the bound
// cannot be certified positive.
double certify_kappa(const Func1D& h, Interval I, int r, int grid = 10000);

// Dense-sampling measure of {t in I : |h(t)| < hbar} at midpoint samples.
double sublevel_measure_oracle(const Func1D& h, Interval I, double hbar, int samples);

}  // namespace oscint
