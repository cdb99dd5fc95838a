#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oscint/opnorm.hpp"
#include "oscint/parallel.hpp"

#if OSCINT_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/SVD>
#endif

using namespace oscint;

namespace {

OperatorSpec full_spec(PhaseModel m, double lambda, bool damped = false) {
    return {std::move(m), lambda, Localization::full(), damped};
}

double discrete_amp_norm2(const DiscretizedOperator& op, bool x_side) {
    // l2 norm of the one-sided amplitude factor on the grid
    double s = 0.0;
    const auto& model = op.spec().model;
    const int n = x_side ? op.rows() : op.cols();
    for (int i = 0; i < n; ++i) {
        Point p;
        if (x_side) {
            p.x = op.x_coord(i);
            p.theta = {0.0, 0.0};
        } else {
            p.x = {0.0, 0.0};
            p.theta = op.theta_coord(i);
        }
        // tensor amplitude: value on one side with the other side at center
        const double v = model.amplitude(p);
        s += v * v;
    }
    return s * (x_side ? op.weight_x() : op.weight_theta());
}

#if OSCINT_HAVE_EIGEN
double dense_svd_norm(const DiscretizedOperator& op) {
    Eigen::MatrixXcd K(op.rows(), op.cols());
    for (int i = 0; i < op.rows(); ++i)
        for (int j = 0; j < op.cols(); ++j) K(i, j) = op.kernel(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K);
    return svd.singularValues()(0) * std::sqrt(op.weight_x() * op.weight_theta());
}
#endif

}  // namespace

TEST_CASE("rank-1 kernel at lambda = 0: apply and norm") {
    // With lambda = 0 the kernel is the tensor amplitude psi1(x) psi2(theta).
    const DiscretizedOperator op = discretize(full_spec(PhaseModel::nondegenerate(), 0.0), 8.0);
    const int nc = op.cols(), nr = op.rows();
    std::vector<std::complex<double>> u(static_cast<std::size_t>(nc));
    for (int j = 0; j < nc; ++j) u[static_cast<std::size_t>(j)] = 0.3 + 0.01 * j;
    std::vector<std::complex<double>> v(static_cast<std::size_t>(nr));
    op.apply(u, v);
    // expected: psi1(x_i) * sum_j psi2(theta_j) u_j dtheta
    std::complex<double> inner{0.0, 0.0};
    for (int j = 0; j < nc; ++j) {
        Point p;
        p.theta = op.theta_coord(j);
        inner += op.spec().model.amplitude(p) * u[static_cast<std::size_t>(j)];
    }
    inner *= op.weight_theta();
    for (int i = 0; i < nr; i += 37) {
        Point p;
        p.x = op.x_coord(i);
        const std::complex<double> expected = op.spec().model.amplitude(p) * inner;
        CHECK(std::abs(v[static_cast<std::size_t>(i)] - expected) <= 1e-12);
    }
    // norm = ||psi1||_2 ||psi2||_2 in the weighted discrete norms
    const double expect =
        std::sqrt(discrete_amp_norm2(op, true)) * std::sqrt(discrete_amp_norm2(op, false));
    CHECK(l2_norm(op, 1e-8) == doctest::Approx(expect).epsilon(1e-6));
    // l1 norm of the product kernel: max |psi2| * ||psi1||_1
    double l1_psi1 = 0.0, max_psi2 = 0.0;
    for (int i = 0; i < nr; ++i) {
        Point p;
        p.x = op.x_coord(i);
        l1_psi1 += op.spec().model.amplitude(p);
    }
    l1_psi1 *= op.weight_x();
    for (int j = 0; j < nc; ++j) {
        Point p;
        p.theta = op.theta_coord(j);
        max_psi2 = std::max(max_psi2, op.spec().model.amplitude(p));
    }
    CHECK(l1_norm(op) == doctest::Approx(l1_psi1 * max_psi2).epsilon(1e-12));
}

TEST_CASE("zero kernel gives zero norms") {
    // h = 1 identically, so a shell at hbar = 1/4 never activates
    OperatorSpec spec{PhaseModel::nondegenerate(), 32.0, Localization::shell(0.25, +1), false};
    const DiscretizedOperator op = discretize(spec, 8.0);
    CHECK(l2_norm(op) == 0.0);
    CHECK(l1_norm(op) == 0.0);
    CHECK(linf_norm(op) == 0.0);
    CHECK(schur_bound(op) == 0.0);
}

TEST_CASE("doubling lambda doubles the per-axis grid") {
    const DiscretizedOperator a = discretize(full_spec(PhaseModel::fold2(), 256.0), 8.0);
    const DiscretizedOperator b = discretize(full_spec(PhaseModel::fold2(), 512.0), 8.0);
    CHECK(b.axis_points_theta() == 2 * a.axis_points_theta());
    CHECK(b.axis_points_x() == 2 * a.axis_points_x());
}

TEST_CASE("kernel entries match direct evaluation") {
    OperatorSpec spec = full_spec(PhaseModel::fold2(), 256.0);
    const DiscretizedOperator op = discretize(spec, 8.0);
    for (int i : {3, 117, op.rows() - 5}) {
        for (int j : {11, op.cols() / 2, op.cols() - 2}) {
            const Point p = op.point(i, j);
            const double amp = spec.model.amplitude(p);
            const double ph = spec.lambda * spec.model.phase(p);
            const std::complex<double> expected{amp * std::cos(ph), amp * std::sin(ph)};
            CHECK(std::abs(op.kernel(i, j) - expected) <= 1e-14);
        }
    }
}

#if OSCINT_HAVE_EIGEN
TEST_CASE("power iteration matches the dense singular-value oracle") {
    GridBudget small;
    small.min_axis_points = 64;
    for (double lambda : {16.0, 64.0}) {
        for (const char* name : {"nondegenerate", "fold2"}) {
            OperatorSpec spec = full_spec(PhaseModel::by_name(name, 1, 1, 1), lambda);
            const DiscretizedOperator op = discretize(spec, 8.0, small);
            REQUIRE(op.rows() <= 256);
            const double pi_norm = l2_norm(op, 1e-10);
            const double svd_norm = dense_svd_norm(op);
            CHECK(pi_norm == doctest::Approx(svd_norm).epsilon(1e-6));
        }
    }
    // shell-localized and damped variants
    OperatorSpec spec{PhaseModel::type_lr(2, 2), 64.0, Localization::shell(0.25, +1), true};
    const DiscretizedOperator op = discretize(spec, 8.0, small);
    if (op.rows() <= 512) {
        CHECK(l2_norm(op, 1e-10) == doctest::Approx(dense_svd_norm(op)).epsilon(1e-6));
    }
}
#endif

TEST_CASE("bilinear-phase norms decay like lambda^{-1/2}") {
    const double n64 = l2_norm(discretize(full_spec(PhaseModel::nondegenerate(), 64.0), 8.0), 1e-6);
    const double n256 =
        l2_norm(discretize(full_spec(PhaseModel::nondegenerate(), 256.0), 8.0), 1e-6);
    CHECK(n256 / n64 == doctest::Approx(0.5).epsilon(0.02));
    // and the absolute size is the stationary-phase value sqrt(2 pi / lambda)
    CHECK(n64 == doctest::Approx(std::sqrt(2.0 * M_PI / 64.0)).epsilon(0.02));
}

TEST_CASE("modulus norms ignore lambda on a fixed grid") {
    OperatorSpec a{PhaseModel::type_lr(2, 2), 16.0, Localization::shell(0.125, +1), false};
    OperatorSpec b = a;
    b.lambda = 1024.0;
    const DiscretizedOperator ob = discretize(b, 8.0);
    const DiscretizedOperator oa = discretize_fixed(a, ob.axis_points_x(), ob.axis_points_theta());
    CHECK(l1_norm(oa) == l1_norm(ob));      // bitwise: the phase never enters
    CHECK(linf_norm(oa) == linf_norm(ob));
}

TEST_CASE("schur bound dominates the measured L2 norm") {
    GridBudget small;
    for (const OperatorSpec& spec :
         {full_spec(PhaseModel::nondegenerate(), 64.0), full_spec(PhaseModel::fold2(), 128.0),
          OperatorSpec{PhaseModel::type_lr(2, 2), 64.0, Localization::shell(0.25, +1), false},
          OperatorSpec{PhaseModel::fold2(), 64.0, Localization::bar(0.25), false}}) {
        const DiscretizedOperator op = discretize(spec, 8.0, small);
        const double l2 = l2_norm(op, 1e-8);
        CHECK(l2 <= schur_bound(op) * (1.0 + 1e-8));
    }
}

TEST_CASE("interpolation endpoints and constant case") {
    CHECK(interpolate_bound(3.0, 5.0, 7.0, 2.0) == doctest::Approx(5.0));
    CHECK(interpolate_bound(3.0, 5.0, 7.0, 1.0) == doctest::Approx(3.0));
    CHECK(interpolate_bound(3.0, 5.0, 7.0, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(7.0));
    for (double p : {1.0, 1.5, 2.0, 3.0, 10.0}) {
        CHECK(interpolate_bound(4.0, 4.0, 4.0, p) == doctest::Approx(4.0));
    }
    CHECK_THROWS_AS(interpolate_bound(1.0, 1.0, 1.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(interpolate_bound(-1.0, 1.0, 1.0, 2.0), PreconditionError);
}

TEST_CASE("grid refinement changes the norm by less than a percent") {
    for (const char* name : {"nondegenerate", "fold2"}) {
        OperatorSpec spec = full_spec(PhaseModel::by_name(name, 1, 1, 1), 128.0);
        const double coarse = l2_norm(discretize(spec, 8.0), 1e-6);
        const double fine = l2_norm(discretize(spec, 16.0), 1e-6);
        CHECK(std::abs(coarse - fine) / fine < 0.01);
    }
}

TEST_CASE("damped kernel is dominated by max|h| times the undamped one") {
    for (const char* name : {"nondegenerate", "fold2"}) {
        OperatorSpec undamped = full_spec(PhaseModel::by_name(name, 1, 1, 1), 128.0);
        OperatorSpec damped = undamped;
        damped.damped = true;
        const DiscretizedOperator ou = discretize(undamped, 8.0);
        const DiscretizedOperator od = discretize(damped, 8.0);
        double max_h = 0.0;
        for (int i = 0; i < ou.rows(); i += 3) {
            for (int j = 0; j < ou.cols(); j += 3) {
                const Point p = ou.point(i, j);
                if (ou.spec().model.amplitude(p) > 0.0) {
                    max_h = std::max(max_h, std::abs(ou.spec().model.h(p)));
                }
            }
        }
        CHECK(l2_norm(od, 1e-6) <= max_h * l2_norm(ou, 1e-6) * (1.0 + 1e-6));
    }
}

TEST_CASE("budget violations name the lambda cap") {
    GridBudget tiny;
    tiny.max_axis_points = 128;
    try {
        discretize(full_spec(PhaseModel::fold2(), 4096.0), 8.0, tiny);
        FAIL("expected a resolution error");
    } catch (const ResolutionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("lambda") != std::string::npos);
        CHECK(msg.find("128") != std::string::npos);
    }
}

TEST_CASE("norms are identical across thread counts") {
    OperatorSpec spec = full_spec(PhaseModel::fold2(), 128.0);
    const DiscretizedOperator op = discretize(spec, 8.0);
    const int before = thread_count();
    set_thread_count(1);
    const double a = l2_norm(op, 1e-8);
    set_thread_count(4);
    const double b = l2_norm(op, 1e-8);
    set_thread_count(before);
    CHECK(a == b);  // bitwise equality: per-row sums and pairwise reductions
}
