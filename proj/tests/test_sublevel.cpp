#include <cmath>
#include <random>

#include "doctest.h"
#include "oscint/lab.hpp"
#include "oscint/phase.hpp"
#include "oscint/sublevel.hpp"

using namespace oscint;

TEST_CASE("polynomial evaluation with derivatives") {
    // 1 - 2t + 3t^3
    const Poly1 p({1.0, -2.0, 0.0, 3.0});
    CHECK(p.eval(0.5) == doctest::Approx(1.0 - 1.0 + 3.0 * 0.125));
    CHECK(p.eval(0.5, 1) == doctest::Approx(-2.0 + 9.0 * 0.25));
    CHECK(p.eval(0.5, 2) == doctest::Approx(18.0 * 0.5));
    CHECK(p.eval(0.5, 3) == doctest::Approx(18.0));
    CHECK(p.eval(0.5, 4) == 0.0);
}

TEST_CASE("sign intervals: linear, parabola, cubic") {
    const Interval I{-1.0, 1.0};

    // r = 1: empty pattern, the interval itself
    const auto lin = sign_intervals(Poly1({0.0, 1.0}).fn(), I, 1);
    REQUIRE(lin.size() == 1);
    CHECK(lin[0].signs.empty());
    CHECK(lin[0].interval.lo == -1.0);
    CHECK(lin[0].interval.hi == 1.0);

    // h = t^2, r = 2: split at the root of h' = 2t
    const auto par = sign_intervals(Poly1({0.0, 0.0, 1.0}).fn(), I, 2);
    REQUIRE(par.size() == 2);
    CHECK(par[0].interval.lo == doctest::Approx(-1.0));
    CHECK(par[0].interval.hi == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(par[0].signs == std::vector<int>{-1});
    CHECK(par[1].interval.lo == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(par[1].signs == std::vector<int>{1});

    // h = t^3 - t, r = 3 on [-2, 2]: breakpoints at -1/sqrt(3), 0, 1/sqrt(3)
    const auto cub = sign_intervals(Poly1({0.0, -1.0, 0.0, 1.0}).fn(), Interval{-2.0, 2.0}, 3);
    REQUIRE(cub.size() == 4);
    const double b = 1.0 / std::sqrt(3.0);
    CHECK(cub[0].interval.hi == doctest::Approx(-b).epsilon(1e-9));
    CHECK(cub[1].interval.hi == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cub[2].interval.hi == doctest::Approx(b).epsilon(1e-9));
    CHECK(cub[0].signs == std::vector<int>{1, -1});
    CHECK(cub[1].signs == std::vector<int>{-1, -1});
    CHECK(cub[2].signs == std::vector<int>{-1, 1});
    CHECK(cub[3].signs == std::vector<int>{1, 1});

    // violated precondition: h^{(r)} changes sign
    CHECK_THROWS_AS(sign_intervals(Poly1({0.0, 0.0, 0.0, 1.0}).fn(), I, 2), PreconditionError);
}

TEST_CASE("sublevel set of the linear and quadratic models") {
    const Interval I{-1.0, 1.0};
    // h = t, kappa = 1, hbar = 0.1: single interval (-0.1, 0.1)
    const SublevelResult lin = sublevel_set(Poly1({0.0, 1.0}).fn(), I, 0.1, 1, 1.0);
    REQUIRE(lin.pieces.size() == 1);
    CHECK(lin.pieces[0].interval.lo == doctest::Approx(-0.1).epsilon(1e-10));
    CHECK(lin.pieces[0].interval.hi == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(lin.measure() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(sublevel_bound(1, 1.0, 0.1) == doctest::Approx(0.2));

    // h = t^2, kappa = 2, hbar = 0.01: two pieces of length 0.1 joined at 0
    const SublevelResult par = sublevel_set(Poly1({0.0, 0.0, 1.0}).fn(), I, 0.01, 2, 2.0);
    REQUIRE(par.pieces.size() == 2);
    CHECK(par.pieces[0].interval.length() == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(par.pieces[1].interval.length() == doctest::Approx(0.1).epsilon(1e-8));
    const double bound = sublevel_bound(2, 2.0, 0.01);
    CHECK(bound == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(par.max_length() <= bound);
}

TEST_CASE("sublevel bound monotonicity") {
    CHECK(sublevel_bound(2, 2.0, 0.02) > sublevel_bound(2, 2.0, 0.01));
    CHECK(sublevel_bound(2, 4.0, 0.01) < sublevel_bound(2, 2.0, 0.01));
    CHECK_THROWS_AS(sublevel_bound(0, 1.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(sublevel_bound(1, -1.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(sublevel_bound(1, 1.0, 0.0), PreconditionError);
}

TEST_CASE("random quintics against the dense-sampling oracle") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const Interval I{-1.0, 1.0};
    int tested = 0;
    while (tested < 60) {
        std::vector<double> cs(6);
        for (auto& c : cs) c = coeff(rng);
        cs[3] += (cs[3] >= 0 ? 2.0 : -2.0);  // keep h''' away from zero
        const Poly1 poly(cs);
        const double kappa = certify_kappa(poly.fn(), I, 3, 4096);
        if (kappa < 0.3) continue;
        ++tested;
        for (int k = 1; k <= 8; ++k) {
            const double hbar = std::exp2(-k);
            const SublevelResult res = sublevel_set(poly.fn(), I, hbar, 3, kappa);
            CHECK(res.pieces.size() <= 4);
            CHECK(res.max_length() <= sublevel_bound(3, kappa, hbar));
            const int ns = 100000;
            const double oracle = sublevel_measure_oracle(poly.fn(), I, hbar, ns);
            const double spacing = I.length() / ns;
            CHECK(std::abs(res.measure() - oracle) <=
                  2.0 * spacing * (static_cast<double>(res.pieces.size()) + 1.0));
        }
    }
}

TEST_CASE("certified kappa is a true lower bound") {
    // |h'''| = |6 + 24 t| on [-1, 1] has minimum ... h = t^4 + t^3: h''' = 24t + 6,
    // vanishing inside; certification must return 0
    CHECK(certify_kappa(Poly1({0.0, 0.0, 0.0, 1.0, 1.0}).fn(), {-1.0, 1.0}, 3) == 0.0);
    // h = 2t^3: h''' = 12, certified close to 12
    const double k = certify_kappa(Poly1({0.0, 0.0, 0.0, 2.0}).fn(), {-1.0, 1.0}, 3);
    CHECK(k > 11.9);
    CHECK(k <= 12.0);
}

TEST_CASE("x-measure of {|h| < hbar} for the type model scales like hbar^{1/r}") {
    // h(x, 0) = x^r at theta = 0; fitted log-log slope within 0.1 of 1/r
    for (int r : {2, 3}) {
        const PhaseModel m = PhaseModel::type_lr(2, r);
        auto h_line = [&](double t, int order) {
            Point p;
            p.x[0] = t;
            p.theta[0] = 0.0;
            MultiIndex ax{order + 1, 0};
            return m.phase_derivative(p, ax, {1, 0});
        };
        std::vector<std::pair<double, double>> samples;
        for (int k = 2; k <= 9; ++k) {
            const double hbar = std::exp2(-k);
            samples.emplace_back(hbar,
                                 sublevel_measure_oracle(h_line, {-1.0, 1.0}, hbar, 200000));
        }
        const DecayFit fit = fit_decay(samples);
        CHECK(std::abs(fit.slope - 1.0 / r) <= 0.1);
    }
}
