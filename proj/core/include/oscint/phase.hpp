#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oscint/common.hpp"

namespace oscint {

// Sparse polynomial in (x1, x2, theta1, theta2). Every built-in phase is
// polynomial, so phase derivatives of any order are exact.
class Poly4 {
  public:
    struct Term {
        std::array<int, 4> exp{0, 0, 0, 0};
        double coeff = 0.0;
    };

    Poly4() = default;
    explicit Poly4(std::vector<Term> terms);

    double eval(const Point& p) const;
    Poly4 derivative(int var) const;  // var: 0 = x1, 1 = x2, 2 = theta1, 3 = theta2
    Poly4 multiply(const Poly4& other) const;
    Poly4 plus(const Poly4& other) const;
    Poly4 scaled(double c) const;
    Poly4 swapped_xtheta() const;  // x_i <-> theta_i
    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    static Poly4 monomial(std::array<int, 4> exp, double coeff);

  private:
    void normalize();
    std::vector<Term> terms_;
};

struct ModelStats {
    double h_scale = 1.0;        // max |h| over a sample grid
    double grad_x_bound = 1.0;   // max |grad_x S|
    double grad_theta_bound = 1.0;
    double grad_h_bound = 1.0;   // max |grad h| (both variable groups)
};

// A phase function S with its amplitude and derivative evaluators. Built-in
// models carry closed-form (polynomial) derivatives; models wrapped from a
// plain callable fall back to central finite differences. Immutable after
// construction; all evaluators are pure.
class PhaseModel {
  public:
    static PhaseModel nondegenerate();
    static PhaseModel fold2();
    static PhaseModel type_lr(int l, int r);
    // n = 2 variant: transverse bilinear block x1*theta1 (optionally twisted
    // by x1^2*theta1) coupled to a 1-d base model in (x2, theta2) through
    // coupling * x2 * theta1.
    static PhaseModel product_n2(const PhaseModel& base1d, double coupling, double twist);
    // Gallery lookup used by the CLI: name in {nondegenerate, fold2, type_lr},
    // n in {1, 2}.
    static PhaseModel by_name(const std::string& name, int l, int r, int n);
    // Wrap a raw phase; derivatives via finite differences. The callable must
    // be evaluable slightly outside the box (stencils overhang the edge).
    static PhaseModel from_function(int n, const Box& box,
                                    std::function<double(const Point&)> phase,
                                    std::string name = "custom");

    PhaseModel transposed() const;  // swap x and theta; types swap sides

    int dim() const { return n_; }
    const std::string& name() const { return name_; }
    const Box& domain() const { return domain_; }
    const ModelStats& stats() const { return stats_; }
    bool analytic() const { return analytic_; }
    int left_type_hint() const { return l_hint_; }
    int right_type_hint() const { return r_hint_; }

    double phase(const Point& p) const;
    // Mixed partial d^{|ax|}_x d^{|ath|}_theta S.
    double phase_derivative(const Point& p, const MultiIndex& ax, const MultiIndex& ath) const;
    double amplitude(const Point& p) const;

    // det S_{x theta}; exact for built-ins.
    double h(const Point& p) const;

  private:
    PhaseModel() = default;
    void finalize();

    int n_ = 1;
    std::string name_;
    Box domain_;
    bool analytic_ = true;
    Poly4 s_poly_;
    Poly4 h_poly_;
    std::function<double(const Point&)> s_fn_;
    ModelStats stats_;
    int l_hint_ = 0;
    int r_hint_ = 0;
    double amp_inner_ = 0.5;  // fraction of the half-width where psi == 1
    double amp_outer_ = 0.9;  // fraction where psi reaches 0
};

// n x n matrix of second mixed partials S_{x_i theta_j} at p.
// Throws DomainError if p lies outside the model box.
std::array<std::array<double, 2>, 2> mixed_hessian(const PhaseModel& model, const Point& p);

// Coefficient vectors of the kernel vector fields: K_right in x-directions,
// K_left in theta-directions. For n = 2 requires the primed block
// S_{x1 theta1} to be invertible at p.
struct KernelFields {
    Coord right{0.0, 0.0};
    Coord left{0.0, 0.0};
};
KernelFields kernel_fields(const PhaseModel& model, const Point& p);

// j-fold application of the side's kernel field to h at p. Exact for n = 1
// analytic models; n = 2 uses finite differences along the field flow.
double iterated_field_h(const PhaseModel& model, const Point& p, int j, Side side);

// Image of the side's kernel field under the differential of the side's
// projection; its norm vanishes on the critical variety.
double projection_pushforward_norm(const PhaseModel& model, const Point& p, Side side);

struct TypeProfile {
    int l = 0;
    int r = 0;
    double kappa_left = 0.0;
    double kappa_right = 0.0;
    std::vector<Point> samples;      // points of the critical variety used
    bool degenerate_kappa = false;   // some sample fell below the detection floor
    bool nondegenerate() const { return samples.empty(); }
};

struct DetectOptions {
    int k_max = 6;
    int scan_lines = 21;      // lines per free coordinate
    int scan_samples = 257;   // samples along each line
    double zero_rel_tol = 1e-4;  // |K^j h| below this times h_scale counts as vanishing
    double root_tol = 1e-12;
};

// Locates the critical variety by root bracketing of h along grid lines and
// classifies the left/right types with their lower bounds kappa.
TypeProfile detect_types(const PhaseModel& model, const DetectOptions& opts = {});

// Segment for h restrictions: starts at (x_start, theta) and flows along the
// right kernel field (left: along the left field in theta) for t in
// [0, t_length]; the primed coordinates of the opposite projection stay
// frozen along the flow.
struct Segment {
    Coord x_start{0.0, 0.0};
    Coord theta{0.0, 0.0};
    double t_length = 0.0;
};

struct SampledFunction {
    std::vector<double> t;
    std::vector<double> value;
};

// Samples (d/dt)^order h along the segment flow.
SampledFunction h_along_segment(const PhaseModel& model, const Segment& seg, int order,
                                Side side, int samples = 33);

// Smallest second-smallest singular value of S_{x theta} over a sample grid;
// positive means corank at most 1 everywhere sampled. (For n = 1 this is the
// largest singular value, trivially positive.)
double min_corank_margin(const PhaseModel& model, int samples_per_axis = 9);

}  // namespace oscint
