#include "oscint/opnorm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oscint/cutoffs.hpp"
#include "oscint/parallel.hpp"

namespace oscint {

Localization Localization::shell(double hbar, int sign) {
    if (!(hbar > 0.0 && hbar <= 1.0)) throw PreconditionError("shell hbar must be in (0, 1]");
    if (sign != 1 && sign != -1) throw PreconditionError("shell sign must be +1 or -1");
    return {LocKind::shell, hbar, sign};
}

Localization Localization::bar(double hbar) {
    if (!(hbar > 0.0 && hbar <= 1.0)) throw PreconditionError("bar hbar must be in (0, 1]");
    return {LocKind::bar, hbar, +1};
}

namespace {

double cutoff_factor(const Localization& loc, double h) {
    switch (loc.kind) {
        case LocKind::full: return 1.0;
        case LocKind::shell: return shell_weight(loc.sign * h / loc.hbar);
        case LocKind::bar: return bar_weight(h / loc.hbar);
    }
    return 1.0;
}

int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

struct AxisGrid {
    double lo = 0.0;
    double step = 0.0;
    double at(int i) const { return lo + step * (i + 0.5); }
};

}  // namespace

double DiscretizedOperator::weight_x() const {
    return dim() == 1 ? dx_ : dx_ * dx_;
}
double DiscretizedOperator::weight_theta() const {
    return dim() == 1 ? dtheta_ : dtheta_ * dtheta_;
}

Coord DiscretizedOperator::x_coord(int i) const {
    const Box& box = spec_.model.domain();
    Coord c{0.0, 0.0};
    if (dim() == 1) {
        c[0] = box.x[0].lo + dx_ * (i + 0.5);
    } else {
        int i1 = i / nx_, i2 = i % nx_;
        c[0] = box.x[0].lo + dx_ * (i1 + 0.5);
        c[1] = box.x[1].lo + dx_ * (i2 + 0.5);
    }
    return c;
}

Coord DiscretizedOperator::theta_coord(int j) const {
    const Box& box = spec_.model.domain();
    Coord c{0.0, 0.0};
    if (dim() == 1) {
        c[0] = box.theta[0].lo + dtheta_ * (j + 0.5);
    } else {
        int j1 = j / ntheta_, j2 = j % ntheta_;
        c[0] = box.theta[0].lo + dtheta_ * (j1 + 0.5);
        c[1] = box.theta[1].lo + dtheta_ * (j2 + 0.5);
    }
    return c;
}

Point DiscretizedOperator::point(int i, int j) const {
    Point p;
    p.x = x_coord(i);
    p.theta = theta_coord(j);
    return p;
}

double DiscretizedOperator::kernel_modulus(int i, int j) const {
    const Point p = point(i, j);
    double a = spec_.model.amplitude(p);
    if (a == 0.0) return 0.0;
    const double h = spec_.model.h(p);
    a *= cutoff_factor(spec_.loc, h);
    if (a == 0.0) return 0.0;
    if (spec_.damped) a *= std::abs(h);
    return a;
}

std::complex<double> DiscretizedOperator::kernel(int i, int j) const {
    const Point p = point(i, j);
    double a = spec_.model.amplitude(p);
    if (a == 0.0) return {0.0, 0.0};
    const double h = spec_.model.h(p);
    a *= cutoff_factor(spec_.loc, h);
    if (a == 0.0) return {0.0, 0.0};
    if (spec_.damped) a *= h;
    const double phase = spec_.lambda * spec_.model.phase(p);
    return {a * std::cos(phase), a * std::sin(phase)};
}

void DiscretizedOperator::build(const GridBudget& budget) {
    const std::size_t entries = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
    if (entries * sizeof(std::complex<double>) <= budget.memory_bytes) {
        storage_ = Storage::dense_double;
        cache_d_.resize(entries);
        parallel_for_chunked(static_cast<std::size_t>(rows_), 8, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                for (int j = 0; j < cols_; ++j)
                    cache_d_[i * cols_ + j] = kernel(static_cast<int>(i), j);
        });
    } else if (entries * sizeof(std::complex<float>) <= budget.memory_bytes) {
        storage_ = Storage::dense_float;
        cache_f_.resize(entries);
        parallel_for_chunked(static_cast<std::size_t>(rows_), 8, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                for (int j = 0; j < cols_; ++j)
                    cache_f_[i * cols_ + j] =
                        std::complex<float>(kernel(static_cast<int>(i), j));
        });
    } else {
        storage_ = Storage::streaming;
    }
}

void DiscretizedOperator::apply(std::span<const std::complex<double>> u,
                                std::span<std::complex<double>> out) const {
    if (static_cast<int>(u.size()) != cols_ || static_cast<int>(out.size()) != rows_) {
        throw PreconditionError("apply: size mismatch");
    }
    const double w = weight_theta();
    parallel_for_chunked(static_cast<std::size_t>(rows_), 8, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            std::complex<double> acc{0.0, 0.0};
            if (storage_ == Storage::dense_double) {
                const std::complex<double>* row = &cache_d_[i * cols_];
                for (int j = 0; j < cols_; ++j) acc += row[j] * u[j];
            } else if (storage_ == Storage::dense_float) {
                const std::complex<float>* row = &cache_f_[i * cols_];
                for (int j = 0; j < cols_; ++j)
                    acc += std::complex<double>(row[j]) * u[j];
            } else {
                for (int j = 0; j < cols_; ++j) acc += kernel(static_cast<int>(i), j) * u[j];
            }
            out[i] = acc * w;
        }
    });
}

void DiscretizedOperator::apply_adjoint(std::span<const std::complex<double>> v,
                                        std::span<std::complex<double>> out) const {
    if (static_cast<int>(v.size()) != rows_ || static_cast<int>(out.size()) != cols_) {
        throw PreconditionError("apply_adjoint: size mismatch");
    }
    const double w = weight_x();
    parallel_for_chunked(static_cast<std::size_t>(cols_), 8, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            std::complex<double> acc{0.0, 0.0};
            if (storage_ == Storage::dense_double) {
                for (int i = 0; i < rows_; ++i)
                    acc += std::conj(cache_d_[static_cast<std::size_t>(i) * cols_ + j]) * v[i];
            } else if (storage_ == Storage::dense_float) {
                for (int i = 0; i < rows_; ++i)
                    acc += std::conj(std::complex<double>(
                               cache_f_[static_cast<std::size_t>(i) * cols_ + j])) *
                           v[i];
            } else {
                for (int i = 0; i < rows_; ++i)
                    acc += std::conj(kernel(i, static_cast<int>(j))) * v[i];
            }
            out[j] = acc * w;
        }
    });
}

namespace {

// Per-axis spacing requirement: resolve the phase oscillation at
// points_per_wavelength points per 2*pi/(lambda |grad S|), and the cutoff
// feature width hbar/|grad h| at the same density.
int required_axis_points(const OperatorSpec& spec, double ppw, bool theta_axis,
                         const GridBudget& budget) {
    const PhaseModel& m = spec.model;
    const ModelStats& st = m.stats();
    double axis_len = 0.0;
    for (int i = 0; i < m.dim(); ++i) {
        const Interval& iv = theta_axis ? m.domain().theta[i] : m.domain().x[i];
        axis_len = std::max(axis_len, iv.length());
    }
    const double grad = theta_axis ? st.grad_theta_bound : st.grad_x_bound;
    double dt_phase = 2.0 * M_PI / (ppw * std::max(1e-12, spec.lambda * grad));
    double dt = dt_phase;
    if (spec.loc.kind != LocKind::full) {
        double dt_cut = spec.loc.hbar / (ppw * st.grad_h_bound);
        dt = std::min(dt, dt_cut);
    }
    int n = static_cast<int>(std::ceil(axis_len / dt));
    n = std::max(n, budget.min_axis_points);
    return next_pow2(n);
}

}  // namespace

DiscretizedOperator discretize(const OperatorSpec& spec, double points_per_wavelength,
                               const GridBudget& budget) {
    if (!(points_per_wavelength > 0.0)) throw PreconditionError("points_per_wavelength > 0 required");
    if (!(spec.lambda >= 0.0)) throw PreconditionError("lambda must be nonnegative");
    const int nx = required_axis_points(spec, points_per_wavelength, false, budget);
    const int ntheta = required_axis_points(spec, points_per_wavelength, true, budget);
    if (nx > budget.max_axis_points || ntheta > budget.max_axis_points) {
        const int need = std::max(nx, ntheta);
        const double lambda_cap =
            spec.lambda * static_cast<double>(budget.max_axis_points) / need;
        std::ostringstream msg;
        msg << "grid of " << need << " points per axis exceeds the budget of "
            << budget.max_axis_points << "; largest feasible lambda at this resolution is about "
            << lambda_cap;
        throw ResolutionError(msg.str());
    }
    return discretize_fixed(spec, nx, ntheta, budget);
}

DiscretizedOperator discretize_fixed(const OperatorSpec& spec, int nx, int ntheta,
                                     const GridBudget& budget) {
    if (nx < 2 || ntheta < 2) throw PreconditionError("need at least 2 points per axis");
    DiscretizedOperator op;
    op.spec_ = spec;
    op.nx_ = nx;
    op.ntheta_ = ntheta;
    const int n = spec.model.dim();
    op.rows_ = n == 1 ? nx : nx * nx;
    op.cols_ = n == 1 ? ntheta : ntheta * ntheta;
    // Uniform spacing across the (equal-length) axes of each group.
    op.dx_ = spec.model.domain().x[0].length() / nx;
    op.dtheta_ = spec.model.domain().theta[0].length() / ntheta;
    op.build(budget);
    return op;
}

namespace {

double vec_norm(std::span<const std::complex<double>> v) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = std::norm(v[i]);
    return std::sqrt(pairwise_sum(std::span<const double>(sq)));
}

std::complex<double> vec_dot(std::span<const std::complex<double>> a,
                             std::span<const std::complex<double>> b) {
    std::vector<std::complex<double>> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = std::conj(a[i]) * b[i];
    return pairwise_sum(std::span<const std::complex<double>>(prod));
}

}  // namespace

double l2_norm(const DiscretizedOperator& op, double rel_tol, int max_iter) {
    if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");
    const int nc = op.cols();
    std::vector<std::complex<double>> u(static_cast<std::size_t>(nc));
    std::mt19937 rng(0x05c1u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& z : u) z = {dist(rng), dist(rng)};
    double un = vec_norm(u);
    for (auto& z : u) z /= un;

    std::vector<std::complex<double>> w(static_cast<std::size_t>(op.rows()));
    std::vector<std::complex<double>> z(static_cast<std::size_t>(nc));
    // Continuum scaling: ||T|| = sigma_max(K) * sqrt(wx * wtheta); apply()
    // already multiplies by wtheta and apply_adjoint() by wx, so the power
    // iteration below converges to sigma_max(K)^2 * wx * wtheta directly.
    double prev = -1.0;
    int stable = 0;
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        op.apply(u, w);
        op.apply_adjoint(w, z);
        const double rq = std::real(vec_dot(u, z));  // = ||T u||^2 for unit u
        if (rq <= 0.0) return 0.0;                   // zero (or numerically zero) kernel
        sigma = std::sqrt(rq);
        if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) {
            if (++stable >= 2) return sigma;
        } else {
            stable = 0;
        }
        prev = sigma;
        const double zn = vec_norm(z);
        if (zn == 0.0) return 0.0;
        for (int j = 0; j < nc; ++j) u[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(j)] / zn;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge after " << max_iter
        << " iterations; last gap " << std::abs(sigma - prev) << " at value " << sigma;
    throw IterationError(msg.str());
}

double l1_norm(const DiscretizedOperator& op) {
    const double w = op.weight_x();
    std::vector<double> colsum(static_cast<std::size_t>(op.cols()), 0.0);
    parallel_for_chunked(static_cast<std::size_t>(op.cols()), 8, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            double s = 0.0;
            for (int i = 0; i < op.rows(); ++i) s += op.kernel_modulus(i, static_cast<int>(j));
            colsum[j] = s * w;
        }
    });
    return *std::max_element(colsum.begin(), colsum.end());
}

double linf_norm(const DiscretizedOperator& op) {
    const double w = op.weight_theta();
    std::vector<double> rowsum(static_cast<std::size_t>(op.rows()), 0.0);
    parallel_for_chunked(static_cast<std::size_t>(op.rows()), 8, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            double s = 0.0;
            for (int j = 0; j < op.cols(); ++j) s += op.kernel_modulus(static_cast<int>(i), j);
            rowsum[i] = s * w;
        }
    });
    return *std::max_element(rowsum.begin(), rowsum.end());
}

double schur_bound(const DiscretizedOperator& op) {
    return std::sqrt(l1_norm(op) * linf_norm(op));
}

double interpolate_bound(double norm1, double norm2, double norm_inf, double p) {
    if (!(p >= 1.0)) throw PreconditionError("p must be in [1, inf]");
    if (!(norm1 > 0.0 && norm2 > 0.0 && norm_inf > 0.0)) {
        throw PreconditionError("interpolation inputs must be positive");
    }
    if (p <= 2.0) {
        // theta with 1/p = (1-theta)/1 + theta/2
        return std::pow(norm1, 2.0 / p - 1.0) * std::pow(norm2, 2.0 - 2.0 / p);
    }
    return std::pow(norm_inf, 1.0 - 2.0 / p) * std::pow(norm2, 2.0 / p);
}

}  // namespace oscint
