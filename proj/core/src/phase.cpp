#include "oscint/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "oscint/cutoffs.hpp"

namespace oscint {

// ---------------------------------------------------------------------------
// Poly4

Poly4::Poly4(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

Poly4 Poly4::monomial(std::array<int, 4> exp, double coeff) {
    return Poly4({Term{exp, coeff}});
}

void Poly4::normalize() {
    std::map<std::array<int, 4>, double> acc;
    for (const Term& t : terms_) acc[t.exp] += t.coeff;
    terms_.clear();
    for (const auto& [e, c] : acc) {
        if (c != 0.0) terms_.push_back({e, c});
    }
}

double Poly4::eval(const Point& p) const {
    const double v[4] = {p.x[0], p.x[1], p.theta[0], p.theta[1]};
    double sum = 0.0;
    for (const Term& t : terms_) {
        double m = t.coeff;
        for (int i = 0; i < 4; ++i) {
            for (int e = 0; e < t.exp[i]; ++e) m *= v[i];
        }
        sum += m;
    }
    return sum;
}

Poly4 Poly4::derivative(int var) const {
    std::vector<Term> out;
    for (const Term& t : terms_) {
        if (t.exp[var] == 0) continue;
        Term d = t;
        d.coeff *= t.exp[var];
        d.exp[var] -= 1;
        out.push_back(d);
    }
    return Poly4(std::move(out));
}

Poly4 Poly4::multiply(const Poly4& other) const {
    std::vector<Term> out;
    for (const Term& a : terms_) {
        for (const Term& b : other.terms_) {
            Term t;
            for (int i = 0; i < 4; ++i) t.exp[i] = a.exp[i] + b.exp[i];
            t.coeff = a.coeff * b.coeff;
            out.push_back(t);
        }
    }
    return Poly4(std::move(out));
}

Poly4 Poly4::plus(const Poly4& other) const {
    std::vector<Term> out = terms_;
    out.insert(out.end(), other.terms_.begin(), other.terms_.end());
    return Poly4(std::move(out));
}

Poly4 Poly4::scaled(double c) const {
    std::vector<Term> out = terms_;
    for (Term& t : out) t.coeff *= c;
    return Poly4(std::move(out));
}

Poly4 Poly4::swapped_xtheta() const {
    std::vector<Term> out = terms_;
    for (Term& t : out) {
        std::swap(t.exp[0], t.exp[2]);
        std::swap(t.exp[1], t.exp[3]);
    }
    return Poly4(std::move(out));
}

// ---------------------------------------------------------------------------
// Finite differences (Fornberg weights, central stencils of accuracy >= 4)

namespace {

// Weights for the m-th derivative at x0 = 0 from nodes `grid` (Fornberg 1988).
std::vector<double> fd_weights(int m, const std::vector<double>& grid) {
    const int nd = static_cast<int>(grid.size()) - 1;
    std::vector<std::vector<std::vector<double>>> d(
        static_cast<std::size_t>(m + 1),
        std::vector<std::vector<double>>(grid.size(), std::vector<double>(grid.size(), 0.0)));
    d[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= nd; ++nn) {
        double c2 = 1.0;
        for (int nu = 0; nu < nn; ++nu) {
            double c3 = grid[nn] - grid[nu];
            c2 *= c3;
            for (int mm = 0; mm <= std::min(nn, m); ++mm) {
                d[mm][nn][nu] = (grid[nn] * d[mm][nn - 1][nu] -
                                 (mm > 0 ? mm * d[mm - 1][nn - 1][nu] : 0.0)) /
                                c3;
            }
        }
        for (int mm = 0; mm <= std::min(nn, m); ++mm) {
            d[mm][nn][nn] = c1 / c2 *
                            ((mm > 0 ? mm * d[mm - 1][nn - 1][nn - 1] : 0.0) -
                             grid[nn - 1] * d[mm][nn - 1][nn - 1]);
        }
        c1 = c2;
    }
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = d[m][nd][i];
    return w;
}

// Symmetric node offsets for derivative order m with at least 4th-order
// accuracy.
std::vector<double> central_offsets(int m) {
    int half = (m + 4) / 2 + 1;
    std::vector<double> off;
    for (int i = -half; i <= half; ++i) off.push_back(static_cast<double>(i));
    return off;
}

// Step size for a total derivative order j with 4th-order stencils: balances
// the h^4 truncation against eps/h^j rounding.
double fd_step(int j, double scale) {
    return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (j + 4)) * scale;
}

// m-th derivative of g at t0.
double fd_derivative(const std::function<double(double)>& g, double t0, int m, double h) {
    if (m == 0) return g(t0);
    const auto off = central_offsets(m);
    const auto w = fd_weights(m, off);
    double sum = 0.0;
    for (std::size_t i = 0; i < off.size(); ++i) {
        if (w[i] != 0.0) sum += w[i] * g(t0 + off[i] * h);
    }
    return sum / std::pow(h, m);
}

double box_scale(const Box& box, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s = std::max(s, box.x[i].length());
        s = std::max(s, box.theta[i].length());
    }
    return s > 0.0 ? s : 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhaseModel factories

PhaseModel PhaseModel::nondegenerate() {
    PhaseModel m;
    m.n_ = 1;
    m.name_ = "nondegenerate";
    m.domain_.x[0] = {-1.0, 1.0};
    m.domain_.theta[0] = {-1.0, 1.0};
    m.s_poly_ = Poly4::monomial({1, 0, 1, 0}, 1.0);
    m.finalize();
    return m;
}

PhaseModel PhaseModel::fold2() {
    PhaseModel m;
    m.n_ = 1;
    m.name_ = "fold2";
    m.domain_.x[0] = {-1.0, 1.0};
    m.domain_.theta[0] = {-1.0, 1.0};
    // x*theta + (x - theta)^3 / 3
    m.s_poly_ = Poly4(std::vector<Poly4::Term>{
        {{1, 0, 1, 0}, 1.0},
        {{3, 0, 0, 0}, 1.0 / 3.0},
        {{2, 0, 1, 0}, -1.0},
        {{1, 0, 2, 0}, 1.0},
        {{0, 0, 3, 0}, -1.0 / 3.0},
    });
    m.l_hint_ = 1;
    m.r_hint_ = 1;
    m.finalize();
    return m;
}

PhaseModel PhaseModel::type_lr(int l, int r) {
    if (l < 1 || r < 1) throw PreconditionError("type_lr requires l, r >= 1");
    PhaseModel m;
    m.n_ = 1;
    m.name_ = "type_lr";
    m.domain_.x[0] = {-1.0, 1.0};
    m.domain_.theta[0] = {-1.0, 1.0};
    // x^{r+1} theta / (r+1) - x theta^{l+1} / (l+1); h = x^r - theta^l
    m.s_poly_ = Poly4(std::vector<Poly4::Term>{
        {{r + 1, 0, 1, 0}, 1.0 / (r + 1)},
        {{1, 0, l + 1, 0}, -1.0 / (l + 1)},
    });
    m.l_hint_ = l;
    m.r_hint_ = r;
    m.finalize();
    return m;
}

PhaseModel PhaseModel::product_n2(const PhaseModel& base1d, double coupling, double twist) {
    if (base1d.n_ != 1) throw PreconditionError("product_n2 needs a 1-d base model");
    if (!base1d.analytic_) throw PreconditionError("product_n2 needs an analytic base model");
    PhaseModel m;
    m.n_ = 2;
    m.name_ = base1d.name_ + "_n2";
    m.domain_.x[0] = {-1.0, 1.0};
    m.domain_.x[1] = base1d.domain_.x[0];
    m.domain_.theta[0] = {-1.0, 1.0};
    m.domain_.theta[1] = base1d.domain_.theta[0];
    // x1*theta1 + twist*x1^2*theta1/2 + coupling*x2*theta1 + S_base(x2, theta2)
    Poly4 s = Poly4::monomial({1, 0, 1, 0}, 1.0);
    if (twist != 0.0) s = s.plus(Poly4::monomial({2, 0, 1, 0}, 0.5 * twist));
    if (coupling != 0.0) s = s.plus(Poly4::monomial({0, 1, 1, 0}, coupling));
    // remap base terms (x, theta) -> (x2, theta2)
    std::vector<Poly4::Term> base_terms;
    for (const Poly4::Term& t : base1d.s_poly_.terms()) {
        base_terms.push_back({{0, t.exp[0], 0, t.exp[2]}, t.coeff});
    }
    m.s_poly_ = s.plus(Poly4(std::move(base_terms)));
    m.l_hint_ = base1d.l_hint_;
    m.r_hint_ = base1d.r_hint_;
    m.finalize();
    return m;
}

PhaseModel PhaseModel::by_name(const std::string& name, int l, int r, int n) {
    PhaseModel base;
    if (name == "nondegenerate") {
        base = nondegenerate();
    } else if (name == "fold2") {
        base = fold2();
    } else if (name == "type_lr") {
        base = type_lr(l < 1 ? 1 : l, r < 1 ? 1 : r);
    } else {
        throw ConfigError("unknown model '" + name +
                          "' (expected nondegenerate, fold2 or type_lr)");
    }
    if (n == 1) return base;
    if (n == 2) return product_n2(base, 0.5, 0.4);
    throw ConfigError("model dimension n must be 1 or 2");
}

PhaseModel PhaseModel::from_function(int n, const Box& box,
                                     std::function<double(const Point&)> phase,
                                     std::string name) {
    if (n < 1 || n > 2) throw PreconditionError("dimension n must be 1 or 2");
    PhaseModel m;
    m.n_ = n;
    m.name_ = std::move(name);
    m.domain_ = box;
    m.analytic_ = false;
    m.s_fn_ = std::move(phase);
    m.finalize();
    return m;
}

PhaseModel PhaseModel::transposed() const {
    PhaseModel m = *this;
    m.name_ = name_ + "_transposed";
    std::swap(m.l_hint_, m.r_hint_);
    std::swap(m.domain_.x, m.domain_.theta);
    if (analytic_) {
        m.s_poly_ = s_poly_.swapped_xtheta();
    } else {
        auto fn = s_fn_;
        m.s_fn_ = [fn](const Point& p) {
            Point q;
            q.x = p.theta;
            q.theta = p.x;
            return fn(q);
        };
    }
    m.finalize();
    return m;
}

void PhaseModel::finalize() {
    if (analytic_) {
        // h = det S_{x theta} as an exact polynomial.
        auto sd = [&](int xi, int ti) {
            return s_poly_.derivative(xi).derivative(2 + ti);
        };
        if (n_ == 1) {
            h_poly_ = sd(0, 0);
        } else {
            h_poly_ = sd(0, 0).multiply(sd(1, 1)).plus(sd(0, 1).multiply(sd(1, 0)).scaled(-1.0));
        }
    }
    // Sampled bounds used by grid sizing and detection thresholds.
    const int ns = analytic_ ? (n_ == 1 ? 33 : 13) : 9;
    ModelStats st;
    st.h_scale = 0.0;
    st.grad_x_bound = 0.0;
    st.grad_theta_bound = 0.0;
    st.grad_h_bound = 0.0;
    auto axis = [&](const Interval& iv, int i) {
        return iv.lo + (iv.hi - iv.lo) * (static_cast<double>(i) / (ns - 1));
    };
    std::vector<Point> pts;
    if (n_ == 1) {
        for (int i = 0; i < ns; ++i) {
            for (int j = 0; j < ns; ++j) {
                Point p;
                p.x[0] = axis(domain_.x[0], i);
                p.theta[0] = axis(domain_.theta[0], j);
                pts.push_back(p);
            }
        }
    } else {
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j)
                for (int a = 0; a < ns; ++a)
                    for (int b = 0; b < ns; ++b) {
                        Point p;
                        p.x[0] = axis(domain_.x[0], i);
                        p.x[1] = axis(domain_.x[1], j);
                        p.theta[0] = axis(domain_.theta[0], a);
                        p.theta[1] = axis(domain_.theta[1], b);
                        pts.push_back(p);
                    }
    }
    for (const Point& p : pts) {
        st.h_scale = std::max(st.h_scale, std::abs(h(p)));
        double gx = 0.0, gt = 0.0, gh = 0.0;
        for (int i = 0; i < n_; ++i) {
            MultiIndex ex{0, 0}, et{0, 0};
            ex[i] = 1;
            double sx = phase_derivative(p, ex, {0, 0});
            double sth = phase_derivative(p, {0, 0}, ex);
            gx += sx * sx;
            gt += sth * sth;
            (void)et;
        }
        st.grad_x_bound = std::max(st.grad_x_bound, std::sqrt(gx));
        st.grad_theta_bound = std::max(st.grad_theta_bound, std::sqrt(gt));
        if (analytic_) {
            for (int i = 0; i < n_; ++i) {
                double hx = h_poly_.derivative(i).eval(p);
                double ht = h_poly_.derivative(2 + i).eval(p);
                gh += hx * hx + ht * ht;
            }
            st.grad_h_bound = std::max(st.grad_h_bound, std::sqrt(gh));
        }
    }
    if (st.h_scale == 0.0) st.h_scale = 1.0;
    if (st.grad_h_bound == 0.0) st.grad_h_bound = 1.0;
    stats_ = st;
}

// ---------------------------------------------------------------------------
// Evaluators

double PhaseModel::phase(const Point& p) const {
    return analytic_ ? s_poly_.eval(p) : s_fn_(p);
}

double PhaseModel::phase_derivative(const Point& p, const MultiIndex& ax,
                                    const MultiIndex& ath) const {
    if (analytic_) {
        Poly4 d = s_poly_;
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < ax[i]; ++k) d = d.derivative(i);
            for (int k = 0; k < ath[i]; ++k) d = d.derivative(2 + i);
        }
        return d.eval(p);
    }
    // Nested central differences, one variable at a time, innermost first.
    const int total = ax[0] + ax[1] + ath[0] + ath[1];
    if (total == 0) return s_fn_(p);
    const double h = fd_step(total, box_scale(domain_, n_));
    // Pick the first variable with a pending derivative.
    for (int i = 0; i < 2; ++i) {
        if (ax[i] > 0) {
            MultiIndex rest = ax;
            int m = rest[i];
            rest[i] = 0;
            auto g = [&](double t) {
                Point q = p;
                q.x[i] = t;
                return phase_derivative(q, rest, ath);
            };
            return fd_derivative(g, p.x[i], m, h);
        }
    }
    for (int i = 0; i < 2; ++i) {
        if (ath[i] > 0) {
            MultiIndex rest = ath;
            int m = rest[i];
            rest[i] = 0;
            auto g = [&](double t) {
                Point q = p;
                q.theta[i] = t;
                return phase_derivative(q, ax, rest);
            };
            return fd_derivative(g, p.theta[i], m, h);
        }
    }
    return s_fn_(p);
}

double PhaseModel::amplitude(const Point& p) const {
    double v = 1.0;
    for (int i = 0; i < n_; ++i) {
        for (const Interval* iv : {&domain_.x[i], &domain_.theta[i]}) {
            const double t = (iv == &domain_.x[i]) ? p.x[i] : p.theta[i];
            const double c = iv->midpoint();
            const double w = 0.5 * iv->length();
            const double a = amp_inner_ * w;
            const double b = amp_outer_ * w;
            const double d = std::abs(t - c);
            if (d >= b) return 0.0;
            if (d > a) v *= smooth_step((b - d) / (b - a));
        }
    }
    return v;
}

double PhaseModel::h(const Point& p) const {
    if (analytic_) return h_poly_.eval(p);
    if (n_ == 1) return phase_derivative(p, {1, 0}, {1, 0});
    return phase_derivative(p, {1, 0}, {1, 0}) * phase_derivative(p, {0, 1}, {0, 1}) -
           phase_derivative(p, {1, 0}, {0, 1}) * phase_derivative(p, {0, 1}, {1, 0});
}

// ---------------------------------------------------------------------------
// Differential geometry

std::array<std::array<double, 2>, 2> mixed_hessian(const PhaseModel& model, const Point& p) {
    if (!model.domain().contains(p, model.dim())) {
        throw DomainError("point outside the model box");
    }
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};
    for (int i = 0; i < model.dim(); ++i) {
        for (int j = 0; j < model.dim(); ++j) {
            MultiIndex ex{0, 0}, et{0, 0};
            ex[i] = 1;
            et[j] = 1;
            m[i][j] = model.phase_derivative(p, ex, et);
        }
    }
    return m;
}

KernelFields kernel_fields(const PhaseModel& model, const Point& p) {
    KernelFields kf;
    if (model.dim() == 1) {
        kf.right = {1.0, 0.0};
        kf.left = {1.0, 0.0};
        return kf;
    }
    const auto m = mixed_hessian(model, p);
    const double primed = m[0][0];
    if (std::abs(primed) < 1e-12 * std::max(1.0, model.stats().h_scale)) {
        throw PreconditionError("primed mixed block S_{x'theta'} is singular at the point");
    }
    kf.right = {-m[1][0] / primed, 1.0};  // d/dx_n - S^{theta'x'} S_{x_n theta'} d/dx'
    kf.left = {-m[0][1] / primed, 1.0};   // d/theta_n - S^{theta'x'} S_{x' theta_n} d/theta'
    return kf;
}

namespace {

// Advances x (side = right, theta frozen) or theta (side = left) along the
// kernel field by dt using RK4 substeps small enough that the flow error is
// negligible against the finite-difference step.
Point flow_step(const PhaseModel& model, Point p, double dt, Side side) {
    if (model.dim() == 1) {
        if (side == Side::right) {
            p.x[0] += dt;
        } else {
            p.theta[0] += dt;
        }
        return p;
    }
    const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(dt) / 5e-4)));
    const double s = dt / nsub;
    auto vel = [&](const Point& q) -> Coord {
        KernelFields kf = kernel_fields(model, q);
        return side == Side::right ? kf.right : kf.left;
    };
    auto shift = [&](const Point& q, const Coord& v, double a) {
        Point out = q;
        for (int i = 0; i < 2; ++i) {
            if (side == Side::right) {
                out.x[i] = q.x[i] + a * v[i];
            } else {
                out.theta[i] = q.theta[i] + a * v[i];
            }
        }
        return out;
    };
    for (int it = 0; it < nsub; ++it) {
        Coord k1 = vel(p);
        Coord k2 = vel(shift(p, k1, 0.5 * s));
        Coord k3 = vel(shift(p, k2, 0.5 * s));
        Coord k4 = vel(shift(p, k3, s));
        Coord k{0.0, 0.0};
        for (int i = 0; i < 2; ++i) k[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        p = shift(p, k, s);
    }
    return p;
}

}  // namespace

double iterated_field_h(const PhaseModel& model, const Point& p, int j, Side side) {
    if (j < 0) throw PreconditionError("derivative order must be >= 0");
    if (j == 0) return model.h(p);
    if (model.dim() == 1) {
        // K_right = d/dx, K_left = d/dtheta; h = S_{x theta}.
        MultiIndex ax{1, 0}, ath{1, 0};
        if (side == Side::right) {
            ax[0] += j;
        } else {
            ath[0] += j;
        }
        return model.phase_derivative(p, ax, ath);
    }
    // (d/dt)^j of h along the kernel-field flow.
    const double h = fd_step(j, box_scale(model.domain(), model.dim()));
    const auto off = central_offsets(j);
    const auto w = fd_weights(j, off);
    double sum = 0.0;
    for (std::size_t i = 0; i < off.size(); ++i) {
        if (w[i] == 0.0) continue;
        Point q = flow_step(model, p, off[i] * h, side);
        sum += w[i] * model.h(q);
    }
    return sum / std::pow(h, j);
}

double projection_pushforward_norm(const PhaseModel& model, const Point& p, Side side) {
    const auto m = mixed_hessian(model, p);
    const KernelFields kf = kernel_fields(model, p);
    double norm2 = 0.0;
    for (int i = 0; i < model.dim(); ++i) {
        double w = 0.0;
        for (int jj = 0; jj < model.dim(); ++jj) {
            // right: rows S_{theta_i x_j} = m[j][i]; left: rows S_{x_i theta_j} = m[i][j]
            w += (side == Side::right) ? m[jj][i] * kf.right[jj] : m[i][jj] * kf.left[jj];
        }
        norm2 += w * w;
    }
    return std::sqrt(norm2);
}

// ---------------------------------------------------------------------------
// Type detection

namespace {

struct LineScan {
    // 1-d restriction of h with the ambient point reconstruction
    std::function<Point(double)> at;
    Interval range;
};

void scan_line(const PhaseModel& model, const LineScan& line, int samples, double root_tol,
               double h_scale, std::vector<Point>& out) {
    std::vector<double> ts(samples), hs(samples);
    for (int i = 0; i < samples; ++i) {
        ts[i] = line.range.lo + line.range.length() * i / (samples - 1);
        hs[i] = model.h(line.at(ts[i]));
    }
    auto hval = [&](double t) { return model.h(line.at(t)); };
    for (int i = 0; i + 1 < samples; ++i) {
        if (hs[i] == 0.0) {
            out.push_back(line.at(ts[i]));
            continue;
        }
        if (hs[i] * hs[i + 1] < 0.0) {
            double a = ts[i], b = ts[i + 1];
            double fa = hs[i];
            while (b - a > root_tol) {
                double mid = 0.5 * (a + b);
                double fm = hval(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (fa * fm < 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            out.push_back(line.at(0.5 * (a + b)));
        }
    }
    // Tangential roots: local minima of |h| that reach (numerical) zero have
    // no sign change; golden-section polish decides.
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 1; i + 1 < samples; ++i) {
        double ai = std::abs(hs[i]);
        if (ai <= std::abs(hs[i - 1]) && ai <= std::abs(hs[i + 1]) &&
            ai < 0.01 * h_scale && hs[i - 1] * hs[i + 1] > 0.0) {
            double a = ts[i - 1], b = ts[i + 1];
            double c = b - golden * (b - a), d = a + golden * (b - a);
            double fc = std::abs(hval(c)), fd = std::abs(hval(d));
            while (b - a > root_tol) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - golden * (b - a);
                    fc = std::abs(hval(c));
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + golden * (b - a);
                    fd = std::abs(hval(d));
                }
            }
            double t = 0.5 * (a + b);
            if (std::abs(hval(t)) <= 1e-9 * h_scale) out.push_back(line.at(t));
        }
    }
}

}  // namespace

TypeProfile detect_types(const PhaseModel& model, const DetectOptions& opts) {
    const int n = model.dim();
    const double h_scale = model.stats().h_scale;
    const double thresh = opts.zero_rel_tol * h_scale;
    std::vector<Point> roots;

    auto grid = [&](const Interval& iv, int count) {
        std::vector<double> g(count);
        for (int i = 0; i < count; ++i) g[i] = iv.lo + iv.length() * i / (count - 1);
        return g;
    };

    if (n == 1) {
        for (double th : grid(model.domain().theta[0], opts.scan_lines)) {
            LineScan line{[&, th](double t) {
                              Point p;
                              p.x[0] = t;
                              p.theta[0] = th;
                              return p;
                          },
                          model.domain().x[0]};
            scan_line(model, line, opts.scan_samples, opts.root_tol, h_scale, roots);
        }
        for (double x : grid(model.domain().x[0], opts.scan_lines)) {
            LineScan line{[&, x](double t) {
                              Point p;
                              p.x[0] = x;
                              p.theta[0] = t;
                              return p;
                          },
                          model.domain().theta[0]};
            scan_line(model, line, opts.scan_samples, opts.root_tol, h_scale, roots);
        }
    } else {
        const int lines = std::max(3, opts.scan_lines / 3);
        for (double x1 : grid(model.domain().x[0], lines))
            for (double t1 : grid(model.domain().theta[0], lines))
                for (double t2 : grid(model.domain().theta[1], lines)) {
                    LineScan line{[&, x1, t1, t2](double t) {
                                      Point p;
                                      p.x = {x1, t};
                                      p.theta = {t1, t2};
                                      return p;
                                  },
                                  model.domain().x[1]};
                    scan_line(model, line, opts.scan_samples, opts.root_tol, h_scale, roots);
                }
        for (double x1 : grid(model.domain().x[0], lines))
            for (double x2 : grid(model.domain().x[1], lines))
                for (double t1 : grid(model.domain().theta[0], lines)) {
                    LineScan line{[&, x1, x2, t1](double t) {
                                      Point p;
                                      p.x = {x1, x2};
                                      p.theta = {t1, t};
                                      return p;
                                  },
                                  model.domain().theta[1]};
                    scan_line(model, line, opts.scan_samples, opts.root_tol, h_scale, roots);
                }
    }

    // Types are read on the amplitude support only.
    std::vector<Point> samples;
    for (const Point& p : roots) {
        if (model.amplitude(p) > 1e-8) samples.push_back(p);
    }
    if (samples.size() > 400) {
        std::vector<Point> thinned;
        const double stride = static_cast<double>(samples.size()) / 400.0;
        for (double i = 0.0; i < static_cast<double>(samples.size()); i += stride) {
            thinned.push_back(samples[static_cast<std::size_t>(i)]);
        }
        samples.swap(thinned);
    }

    TypeProfile profile;
    if (samples.empty()) return profile;  // nondegenerate: l = r = 0

    auto order_at = [&](const Point& p, Side side) {
        for (int j = 1; j <= opts.k_max; ++j) {
            if (std::abs(iterated_field_h(model, p, j, side)) >= thresh) return j;
        }
        throw InfiniteTypeError("no order <= k_max with |K^j h| above threshold at a critical point");
    };

    for (const Point& p : samples) {
        profile.r = std::max(profile.r, order_at(p, Side::right));
        profile.l = std::max(profile.l, order_at(p, Side::left));
    }
    profile.kappa_right = std::numeric_limits<double>::infinity();
    profile.kappa_left = std::numeric_limits<double>::infinity();
    for (const Point& p : samples) {
        profile.kappa_right =
            std::min(profile.kappa_right, std::abs(iterated_field_h(model, p, profile.r, Side::right)));
        profile.kappa_left =
            std::min(profile.kappa_left, std::abs(iterated_field_h(model, p, profile.l, Side::left)));
    }
    profile.degenerate_kappa = profile.kappa_right < thresh || profile.kappa_left < thresh;
    profile.samples = std::move(samples);
    return profile;
}

SampledFunction h_along_segment(const PhaseModel& model, const Segment& seg, int order,
                                Side side, int samples) {
    if (samples < 1) throw PreconditionError("need at least one sample");
    Point start;
    start.x = seg.x_start;
    start.theta = seg.theta;
    if (!model.domain().contains(start, model.dim())) {
        throw DomainError("segment start outside the model box");
    }
    SampledFunction out;
    out.t.resize(samples);
    out.value.resize(samples);
    Point p = start;
    double t_prev = 0.0;
    for (int i = 0; i < samples; ++i) {
        double t = (samples == 1) ? 0.0 : seg.t_length * i / (samples - 1);
        p = flow_step(model, p, t - t_prev, side);
        t_prev = t;
        out.t[i] = t;
        out.value[i] = (order == 0) ? model.h(p) : iterated_field_h(model, p, order, side);
    }
    return out;
}

double min_corank_margin(const PhaseModel& model, int samples_per_axis) {
    if (model.dim() == 1) return std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    const int ns = samples_per_axis;
    auto axis = [&](const Interval& iv, int i) {
        return iv.lo + iv.length() * i / (ns - 1);
    };
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j)
            for (int a = 0; a < ns; ++a)
                for (int b = 0; b < ns; ++b) {
                    Point p;
                    p.x = {axis(model.domain().x[0], i), axis(model.domain().x[1], j)};
                    p.theta = {axis(model.domain().theta[0], a), axis(model.domain().theta[1], b)};
                    const auto m = mixed_hessian(model, p);
                    const double aa = m[0][0], bb = m[0][1], cc = m[1][0], dd = m[1][1];
                    const double t = aa * aa + bb * bb + cc * cc + dd * dd;
                    const double det = aa * dd - bb * cc;
                    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
                    const double smax = std::sqrt(0.5 * (t + disc));
                    margin = std::min(margin, smax);
                }
    return margin;
}

}  // namespace oscint
