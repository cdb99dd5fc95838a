#include <cmath>
#include <tuple>

#include "doctest.h"
#include "oscint/bounds.hpp"

using namespace oscint;

TEST_CASE("rational arithmetic is exact and normalized") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
    CHECK(Rational(1, 2) / Rational(3, 2) == Rational(1, 3));
    CHECK(Rational(-3, 7) < Rational(0));
    CHECK(Rational(5, 10).value() == 0.5);
    CHECK_THROWS_AS(Rational(1, 0), PreconditionError);
    CHECK_THROWS_AS(Rational(1) / Rational(0), PreconditionError);
}

TEST_CASE("decay loss instances") {
    // 1/2 * (1 - 1/2) * (1 + 1/2)^{-1} = 1/6 for the two-sided fold
    CHECK(decay_loss(1, 1) == Rational(1, 6));
    CHECK(decay_loss_optimal(1, 1) == Rational(1, 6));
    // the generic profile is weaker than the optimal one once both types exceed 1
    CHECK(decay_loss(2, 2) == Rational(3, 10));
    CHECK(decay_loss_optimal(2, 2) == Rational(1, 4));
    CHECK(decay_loss_optimal(2, 2) < decay_loss(2, 2));
    CHECK(decay_loss(0, 0) == Rational(0));
    CHECK_THROWS_AS(decay_loss(0, 2), PreconditionError);
    CHECK_THROWS_AS(decay_loss_optimal(3, 0), PreconditionError);
}

TEST_CASE("decay loss symmetry and comparison with the optimal profile") {
    for (int l = 1; l <= 10; ++l) {
        for (int r = 1; r <= 10; ++r) {
            CHECK(decay_loss(l, r) == decay_loss(r, l));
            CHECK(decay_loss_optimal(l, r) == decay_loss_optimal(r, l));
            const Rational d = decay_loss(l, r);
            const Rational dopt = decay_loss_optimal(l, r);
            CHECK(dopt <= d);
            if (std::min(l, r) == 1) {
                CHECK(d == dopt);
            } else {
                CHECK(dopt < d);
            }
        }
    }
}

TEST_CASE("shell L2 bound regime selection and values") {
    // widest regime at hbar = 1: bound = lambda^{-n/2}
    const RegimeBound top = shell_l2_bound(1, 1, 1, 1024.0, 1.0);
    CHECK(top.regime == Regime::almost_orthogonal);
    CHECK(top.value == doctest::Approx(1.0 / 32.0).epsilon(1e-12));

    // fold: at hbar = lambda^{-1/3} both adjacent regimes give lambda^{-1/3}
    const double lam = 4096.0;
    const double h13 = std::pow(lam, -1.0 / 3.0);
    const RegimeBound at_boundary = shell_l2_bound(1, 1, 1, lam, h13);
    CHECK(at_boundary.regime == Regime::almost_orthogonal);  // tie to the smaller index
    CHECK(at_boundary.value == doctest::Approx(std::pow(lam, -1.0 / 3.0)).epsilon(1e-10));

    // below the validity floor
    CHECK_THROWS_AS(shell_l2_bound(1, 1, 1, 256.0, 1.0 / 32.0), PreconditionError);
    CHECK_THROWS_AS(shell_l2_bound(1, 0, 1, 256.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(shell_l2_bound(3, 1, 1, 256.0, 0.5), PreconditionError);

    // hbar above 1 extends the widest regime
    CHECK(shell_l2_bound(1, 2, 3, 256.0, 2.0).regime == Regime::almost_orthogonal);
}

TEST_CASE("regime boundaries are continuous in exact arithmetic") {
    for (int n = 1; n <= 2; ++n) {
        for (int l = 1; l <= 6; ++l) {
            for (int r = 1; r <= 6; ++r) {
                const auto q = regime_thresholds(l, r);
                for (int i = 0; i < 3; ++i) {
                    const Rational below =
                        exponent_on_ray(n, l, r, static_cast<Regime>(i), q[i]);
                    const Rational above =
                        exponent_on_ray(n, l, r, static_cast<Regime>(i + 1), q[i]);
                    CHECK(below == above);
                }
            }
        }
    }
}

TEST_CASE("fold boundary algebra: -1/2 + 1/6 = -1 + 2/3") {
    const Rational q(1, 3);
    CHECK(exponent_on_ray(1, 1, 1, Regime::almost_orthogonal, q) == Rational(-1, 3));
    CHECK(exponent_on_ray(1, 1, 1, Regime::overlap_count, q) == Rational(-1, 3));
}

TEST_CASE("L1 and Linf bound shapes") {
    auto [b1, binf] = shell_l1_linf_bound(1, 1, 0.25);
    CHECK(b1 == doctest::Approx(0.25));
    CHECK(binf == doctest::Approx(0.25));

    std::tie(b1, binf) = shell_l1_linf_bound(2, 3, 1.0 / 64.0);
    CHECK(b1 == doctest::Approx(0.25).epsilon(1e-12));     // 64^{-1/3}
    CHECK(binf == doctest::Approx(0.125).epsilon(1e-12));  // 64^{-1/2}

    std::tie(b1, binf) = shell_l1_linf_bound(4, 2, 1.0);
    CHECK(b1 == doctest::Approx(1.0));
    CHECK(binf == doctest::Approx(1.0));
}

TEST_CASE("Lp range of a one-sided fold") {
    LpRange lp = one_sided_fold_lp_range(1);
    CHECK(lp.p_low_end == Rational(3, 2));
    CHECK(lp.p_high_end == Rational(3));
    CHECK(lp.interp_exponent == Rational(1, 6));
    CHECK(lp.weak_endpoints);

    lp = one_sided_fold_lp_range(2);
    CHECK(lp.p_low_end == Rational(4, 3));
    CHECK(lp.interp_exponent == Rational(1, 5));

    // r -> infinity: endpoint -> 1, exponent -> 1/4
    lp = one_sided_fold_lp_range(100000);
    CHECK(lp.p_low_end.value() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(lp.interp_exponent.value() == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("dyadic shell sums reproduce the loss exponent and the damped decay") {
    for (int n = 1; n <= 2; ++n) {
        for (int l = 1; l <= 6; ++l) {
            for (int r = 1; r <= 6; ++r) {
                const double target = -0.5 * n + decay_loss(l, r).value();
                CHECK(std::abs(dyadic_sum_exponent(n, l, r, false) - target) <= 1e-10);
                CHECK(std::abs(dyadic_sum_exponent(n, l, r, true) + 0.5 * n) <= 1e-10);
            }
        }
    }
}

TEST_CASE("regime table covers the validity strip") {
    const auto rows = regime_table(1, 2, 3);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].q_min == Rational(0));
    CHECK(rows[0].q_max == Rational(1, 3));
    CHECK(rows[1].q_max == Rational(2, 5));
    CHECK(rows[2].q_max == Rational(3, 7));
    CHECK(rows[3].q_max == Rational(1, 2));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].q_min == rows[i - 1].q_max);
}
