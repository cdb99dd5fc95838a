#include <cmath>
#include <random>

#include "doctest.h"
#include "oscint/cutoffs.hpp"
#include "oscint/phase.hpp"

using namespace oscint;

TEST_CASE("bump plateau, support and reflection symmetry") {
    const Bump phi = make_bump(1.0, 2.0);
    CHECK(phi(0.0) == 1.0);
    CHECK(phi(1.0) == 1.0);
    CHECK(phi(-1.0) == 1.0);
    CHECK(phi(2.0) == 0.0);
    CHECK(phi(-2.0) == 0.0);
    CHECK(phi(2.5) == 0.0);
    const double mid = phi(1.5);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // rising transition complements the falling one
    const double rising = smooth_step((1.5 - 1.0) / (2.0 - 1.0));
    CHECK(mid + rising == doctest::Approx(1.0).epsilon(1e-15));
    // monotone on [a, b]
    double prev = phi(1.0);
    for (int i = 1; i <= 100; ++i) {
        double v = phi(1.0 + i / 100.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    CHECK_THROWS_AS(make_bump(2.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(make_bump(1.0, 1.0), PreconditionError);
}

TEST_CASE("bump derivatives are finite and reproducible") {
    const Bump phi = make_bump(1.0, 2.0);
    auto fd = [&](double t, int order) {
        const double h = 1e-2;
        if (order == 1) return (phi(t + h) - phi(t - h)) / (2 * h);
        if (order == 2) return (phi(t + h) - 2 * phi(t) + phi(t - h)) / (h * h);
        if (order == 3)
            return (phi(t + 2 * h) - 2 * phi(t + h) + 2 * phi(t - h) - phi(t - 2 * h)) /
                   (2 * h * h * h);
        return (phi(t + 2 * h) - 4 * phi(t + h) + 6 * phi(t) - 4 * phi(t - h) + phi(t - 2 * h)) /
               (h * h * h * h);
    };
    for (int order = 1; order <= 4; ++order) {
        for (double t : {1.1, 1.3, 1.5, 1.7, 1.9}) {
            const double v1 = fd(t, order);
            const double v2 = fd(t, order);
            CHECK(std::isfinite(v1));
            CHECK(v1 == v2);
        }
    }
}

TEST_CASE("shell and bar supports") {
    // shell weight lives on [1/2, 2] (positive side), bar on [-2, 2]
    CHECK(shell_weight(-1.0) == 0.0);
    CHECK(shell_weight(0.0) == 0.0);
    CHECK(shell_weight(0.49) == 0.0);
    CHECK(shell_weight(1.0) > 0.0);
    CHECK(shell_weight(2.01) == 0.0);
    CHECK(bar_weight(0.0) == 1.0);
    CHECK(bar_weight(-1.0) == 1.0);
    CHECK(bar_weight(2.0) == 0.0);
    CHECK(bar_weight(-2.5) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 2000; ++i) {
        const double t = u(rng);
        if (shell_weight(t) != 0.0) {
            CHECK(t >= 0.5);
            CHECK(t <= 2.0);
        }
        if (bar_weight(t) != 0.0) CHECK(std::abs(t) <= 2.0);
    }
}

TEST_CASE("dyadic weights telescope") {
    // t = 0: everything sits in the bar piece
    DyadicWeights w = dyadic_weights(0.0, 5);
    CHECK(w.bar == 1.0);
    for (double b : w.beta) CHECK(b == 0.0);

    // |t| <= 2^J: total weight 1
    w = dyadic_weights(7.0, 4);
    CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-15));

    // t = 3, J = 4: first shell weight is bar(3/2) - bar(3) = bar(3/2)
    w = dyadic_weights(3.0, 4);
    CHECK(w.beta[0] == doctest::Approx(bar_weight(1.5)).epsilon(1e-15));
    CHECK(w.total() == doctest::Approx(bar_weight(3.0 / 16.0)).epsilon(1e-15));

    CHECK_THROWS_AS(dyadic_weights(1.0, 0), PreconditionError);
}

TEST_CASE("telescoping identity at random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(-1000.0, 1000.0);
    std::uniform_int_distribution<int> uj(1, 12);
    for (int i = 0; i < 10000; ++i) {
        const double t = ut(rng);
        const int J = uj(rng);
        const DyadicWeights w = dyadic_weights(t, J);
        const double expected = bar_weight(std::ldexp(t, -J));
        CHECK(std::abs(w.total() - expected) <= 1e-14);
    }
}

TEST_CASE("sign transition splits 1") {
    CHECK(sign_transition(-1.0) == 0.0);
    CHECK(sign_transition(-1.5) == 0.0);
    CHECK(sign_transition(1.0) == 1.0);
    CHECK(sign_transition(10.0) == 1.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng);
        CHECK(sign_transition(t) + sign_transition(-t) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("sign weights partition unity over patterns") {
    const PhaseModel model = PhaseModel::type_lr(3, 3);
    const double hbar = 1.0 / 16.0;

    // fold side: empty pattern is the whole partition
    SignPattern empty{Side::right, {}};
    Point p;
    p.x[0] = 0.3;
    p.theta[0] = -0.2;
    CHECK(sign_weight(model, p, hbar, empty) == 1.0);

    // far from the sign boundary the weight saturates:
    // type_lr(3,3) has K_right h = 3 x^2, so x = 0.5 gives K h = 0.75 >> hbar
    SignPattern plus{Side::right, {1}};
    SignPattern minus{Side::right, {-1}};
    Point far;
    far.x[0] = 0.5;
    far.theta[0] = 0.0;
    CHECK(sign_weight(model, far, hbar, plus) == 1.0);
    CHECK(sign_weight(model, far, hbar, minus) == 0.0);

    // sum over all 2^{m-1} patterns = 1 at random points
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const auto right_patterns = all_sign_patterns(Side::right, 3);
    const auto left_patterns = all_sign_patterns(Side::left, 3);
    CHECK(right_patterns.size() == 4);
    for (int i = 0; i < 1000; ++i) {
        Point q;
        q.x[0] = u(rng);
        q.theta[0] = u(rng);
        double sr = 0.0, sl = 0.0;
        for (const auto& pat : right_patterns) sr += sign_weight(model, q, hbar, pat);
        for (const auto& pat : left_patterns) sl += sign_weight(model, q, hbar, pat);
        CHECK(std::abs(sr - 1.0) <= 1e-12);
        CHECK(std::abs(sl - 1.0) <= 1e-12);
    }
}

TEST_CASE("fine windows: translates sum to 1, support is one cell") {
    const PhaseModel model = PhaseModel::fold2();
    const double hbar = 1.0 / 16.0;

    // a window three cells away from the point vanishes
    Point p;
    p.x[0] = 0.1;
    p.theta[0] = 0.2;
    BlockIndex far;
    far.idx[0] = static_cast<int>(std::round(p.x[0] / hbar)) + 3;
    CHECK(fine_window(model, p, hbar, far, Side::right) == 0.0);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const auto [lo, hi] = window_index_range(-1.0, 1.0, hbar);
    for (int i = 0; i < 1000; ++i) {
        Point q;
        q.x[0] = u(rng);
        q.theta[0] = u(rng);
        double sr = 0.0, sl = 0.0;
        for (int X = lo; X <= hi; ++X) {
            BlockIndex idx;
            idx.idx[0] = X;
            sr += fine_window(model, q, hbar, idx, Side::right);
            sl += fine_window(model, q, hbar, idx, Side::left);
        }
        CHECK(std::abs(sr - 1.0) <= 1e-12);
        CHECK(std::abs(sl - 1.0) <= 1e-12);
    }
}

TEST_CASE("window count grows like hbar^{-2} for n = 1 block pairs") {
    // (X, Theta) pairs whose windows meet the amplitude support: the window
    // lattice in x and theta alone gives O(hbar^{-2}) blocks.
    auto count_active = [&](double hbar) {
        const auto [lo, hi] = window_index_range(-0.9, 0.9, hbar);
        long active_x = 0;
        for (int X = lo; X <= hi; ++X) {
            if (hbar * (X + 1) > -0.9 && hbar * (X - 1) < 0.9) ++active_x;
        }
        return active_x * active_x;
    };
    const long c4 = count_active(std::exp2(-4));
    const long c5 = count_active(std::exp2(-5));
    CHECK(c5 > 3 * c4);  // quadruples up to lattice edge effects
    CHECK(c5 < 5 * c4);
}

TEST_CASE("n = 2 fine windows localize the primed covariable") {
    const PhaseModel model = PhaseModel::by_name("fold2", 1, 1, 2);
    const double hbar = 0.25;
    Point p;
    p.x = {0.2, 0.1};
    p.theta = {-0.1, 0.3};
    const double eta = model.phase_derivative(p, {0, 0}, {1, 0});  // S_{theta'}
    BlockIndex idx;
    idx.idx[0] = static_cast<int>(std::round(eta / hbar));
    idx.idx[1] = static_cast<int>(std::round(p.x[1] / hbar));
    CHECK(fine_window(model, p, hbar, idx, Side::right) > 0.0);
    idx.idx[0] += 4;
    CHECK(fine_window(model, p, hbar, idx, Side::right) == 0.0);
}

TEST_CASE("admissibility: cutoff gradients scale like 1/hbar") {
    // hbar * sup |grad| of the sign weight and of a fine window stays bounded
    // over dyadic hbar; the sign weight rho(K h / hbar) = rho(2x / hbar)
    // transitions across x = 0 for this model
    const PhaseModel model = PhaseModel::type_lr(2, 2);
    SignPattern pat{Side::right, {1}};
    double worst = 0.0;
    for (int j = 2; j <= 8; ++j) {
        const double hbar = std::exp2(-j);
        double max_grad = 0.0;
        for (int i = 0; i <= 400; ++i) {
            Point p;
            p.x[0] = -hbar + 2.0 * hbar * i / 400.0;
            p.theta[0] = 0.05;
            const double step = hbar * 1e-6;
            Point pp = p, pm = p;
            pp.x[0] += step;
            pm.x[0] -= step;
            const double g =
                (sign_weight(model, pp, hbar, pat) - sign_weight(model, pm, hbar, pat)) /
                (2 * step);
            max_grad = std::max(max_grad, std::abs(g));
        }
        worst = std::max(worst, max_grad * hbar);
    }
    CHECK(worst > 0.0);
    CHECK(worst < 50.0);  // uniform over hbar; the constant depends on rho only

    double worst_win = 0.0;
    for (int j = 2; j <= 8; ++j) {
        const double hbar = std::exp2(-j);
        double max_grad = 0.0;
        BlockIndex idx;
        idx.idx[0] = 0;
        for (int i = 0; i <= 400; ++i) {
            Point p;
            p.x[0] = -2.0 * hbar + 4.0 * hbar * i / 400.0;
            p.theta[0] = 0.0;
            const double step = hbar * 1e-6;
            Point pp = p, pm = p;
            pp.x[0] += step;
            pm.x[0] -= step;
            const double g = (fine_window(model, pp, hbar, idx, Side::right) -
                              fine_window(model, pm, hbar, idx, Side::right)) /
                             (2 * step);
            max_grad = std::max(max_grad, std::abs(g));
        }
        worst_win = std::max(worst_win, max_grad * hbar);
    }
    CHECK(worst_win > 0.0);
    CHECK(worst_win < 50.0);
}

TEST_CASE("shell and bar factors pin h to the hbar scale") {
    const PhaseModel model = PhaseModel::type_lr(2, 2);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 1; j <= 6; ++j) {
        const double hbar = std::exp2(-j);
        for (int i = 0; i < 2000; ++i) {
            Point p;
            p.x[0] = u(rng);
            p.theta[0] = u(rng);
            const double h = model.h(p);
            if (shell_weight(h / hbar) != 0.0) {
                CHECK(h >= 0.5 * hbar);
                CHECK(h <= 2.0 * hbar);
            }
            if (bar_weight(h / hbar) != 0.0) CHECK(std::abs(h) <= 2.0 * hbar);
        }
    }
}
