#pragma once

#include <complex>
#include <span>
#include <vector>

#include "oscint/phase.hpp"

namespace oscint {

enum class LocKind { full, shell, bar };

// Kernel localization: full (no cutoff), shell on {sign*h ~ hbar} via the
// dyadic shell cutoff, or bar on {|h| <= 2 hbar}.
struct Localization {
    LocKind kind = LocKind::full;
    double hbar = 1.0;
    int sign = +1;

    static Localization full() { return {}; }
    static Localization shell(double hbar, int sign);
    static Localization bar(double hbar);
};

struct OperatorSpec {
    PhaseModel model;
    double lambda = 1.0;
    Localization loc = Localization::full();
    bool damped = false;  // multiply the amplitude by h
};

struct GridBudget {
    int min_axis_points = 64;
    int max_axis_points = 16384;
    std::size_t memory_bytes = 1'200'000'000;  // kernel cache cap
};

// Midpoint-rule quadrature stand-in for the integral operator. The kernel is
// cached densely (double, then float) when it fits the memory budget and
// recomputed on the fly otherwise; application is matrix-free either way and
// parallelizes over output rows with per-row serial sums, so results do not
// depend on the thread count.
class DiscretizedOperator {
  public:
    enum class Storage { dense_double, dense_float, streaming };

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int axis_points_x() const { return nx_; }
    int axis_points_theta() const { return ntheta_; }
    int dim() const { return spec_.model.dim(); }
    double dx() const { return dx_; }
    double dtheta() const { return dtheta_; }
    double weight_x() const;      // dx^n
    double weight_theta() const;  // dtheta^n
    Storage storage() const { return storage_; }
    const OperatorSpec& spec() const { return spec_; }

    Coord x_coord(int i) const;
    Coord theta_coord(int j) const;
    Point point(int i, int j) const;

    // Kernel entry, always evaluated in double (bypasses the float cache).
    std::complex<double> kernel(int i, int j) const;
    // |kernel|: amplitude times cutoffs times |h| under damping; carries no
    // phase factor, hence independent of lambda for a fixed grid.
    double kernel_modulus(int i, int j) const;

    // out_i = sum_j K(i,j) u_j * dtheta^n
    void apply(std::span<const std::complex<double>> u,
               std::span<std::complex<double>> out) const;
    // out_j = sum_i conj(K(i,j)) v_i * dx^n
    void apply_adjoint(std::span<const std::complex<double>> v,
                       std::span<std::complex<double>> out) const;

    friend DiscretizedOperator discretize(const OperatorSpec&, double, const GridBudget&);
    friend DiscretizedOperator discretize_fixed(const OperatorSpec&, int, int, const GridBudget&);

  private:
    DiscretizedOperator() = default;
    void build(const GridBudget& budget);

    OperatorSpec spec_{PhaseModel::nondegenerate()};
    int nx_ = 0, ntheta_ = 0;
    int rows_ = 0, cols_ = 0;
    double dx_ = 0.0, dtheta_ = 0.0;
    Storage storage_ = Storage::streaming;
    std::vector<std::complex<double>> cache_d_;
    std::vector<std::complex<float>> cache_f_;
};

// Chooses the grid from the points-per-wavelength rule against the phase
// oscillation and the cutoff feature width, rounded up to a power of two.
// Throws ResolutionError (naming the largest feasible lambda) if the axis
// budget is exceeded.
DiscretizedOperator discretize(const OperatorSpec& spec, double points_per_wavelength,
                               const GridBudget& budget = {});

// Fixed per-axis point counts; used to compare operators across lambda on a
// common grid.
DiscretizedOperator discretize_fixed(const OperatorSpec& spec, int nx, int ntheta,
                                     const GridBudget& budget = {});

// Largest singular value of the quadrature operator, scaled to approximate
// the continuum L2 -> L2 norm. Power iteration on the adjoint composition
// with a fixed seeded start vector and a Rayleigh-quotient stopping test.
double l2_norm(const DiscretizedOperator& op, double rel_tol = 1e-4, int max_iter = 10000);

// Exact L1 -> L1 / Linf -> Linf norms of the discretized modulus-kernel
// majorant (sup of column / row sums of |K|).
double l1_norm(const DiscretizedOperator& op);
double linf_norm(const DiscretizedOperator& op);

// sqrt(l1_norm * linf_norm); dominates l2_norm.
double schur_bound(const DiscretizedOperator& op);

// Riesz-Thorin interpolation of (norm1, norm2, norm_inf) at exponent p.
double interpolate_bound(double norm1, double norm2, double norm_inf, double p);

}  // namespace oscint
