#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/rng.hpp"

using namespace ldpcdo;

TEST_CASE("relative entropy closed-form values") {
    CHECK(hbar(0.1, 0.03) == doctest::Approx(0.052986103076787619).epsilon(1e-14));
    CHECK(hbar(0.1, 0.05) == doctest::Approx(0.020654218912746340).epsilon(1e-14));
    CHECK(hbar(1.0, 0.25) == doctest::Approx(1.3862943611198906).epsilon(1e-14));
    CHECK(hbar(0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("relative entropy boundary conventions") {
    CHECK(hbar(0.0, 0.0) == 0.0);
    CHECK(hbar(1.0, 1.0) == 0.0);
    CHECK(std::isinf(hbar(0.3, 0.0)));
    CHECK(std::isinf(hbar(0.3, 1.0)));
    CHECK(std::isinf(hbar(1.0, 0.0)));
    CHECK(std::isinf(hbar(0.0, 1.0)));
}

TEST_CASE("relative entropy is nonnegative, zero only on the diagonal") {
    for (int i = 1; i < 200; ++i) {
        for (int j = 1; j < 200; ++j) {
            const double a1 = i / 200.0, a2 = j / 200.0;
            const double h = hbar(a1, a2);
            CHECK(h >= 0.0);
            if (i == j)
                CHECK(h == doctest::Approx(0.0).epsilon(1e-15));
            else
                CHECK(h > 0.0);
        }
    }
}

TEST_CASE("relative entropy is convex in its first argument") {
    for (double f : {0.03, 0.2, 0.5, 0.8}) {
        for (int i = 1; i + 2 < 100; ++i) {
            const double a = i / 100.0, b = (i + 2) / 100.0;
            CHECK(hbar(0.5 * (a + b), f) <= 0.5 * (hbar(a, f) + hbar(b, f)) + 1e-14);
        }
    }
}

TEST_CASE("tilting exponent is the entropy derivative") {
    const double eps = 1e-6;
    for (double f : {0.03, 0.05, 0.2}) {
        for (double a : {0.08, 0.1, 0.3, 0.6}) {
            if (a <= f) continue;
            const double deriv = (hbar(a + eps, f) - hbar(a - eps, f)) / (2.0 * eps);
            CHECK(deriv == doctest::Approx(kappa(a, f)).epsilon(1e-6));
        }
    }
}

TEST_CASE("tilting exponent values and identities") {
    CHECK(kappa(0.1, 0.03) == doctest::Approx(1.2788741124990537).epsilon(1e-14));
    CHECK(kappa(0.1, 0.05) == doctest::Approx(0.74721440183022108).epsilon(1e-14));
    // e^{-k}/(1-e^{-k})^2 = a(1-a)f(1-f)/(a-f)^2 and 1/(1-e^{-k}) = a(1-f)/(a-f).
    RngStream stream(99, 0);
    for (int i = 0; i < 200; ++i) {
        const double f = 0.01 + 0.5 * stream.next_uniform();
        const double a = f + (1.0 - f - 0.01) * stream.next_uniform();
        const double k = kappa(a, f);
        CHECK(k > 0.0);
        const double e = std::exp(-k);
        CHECK(e / ((1.0 - e) * (1.0 - e)) ==
              doctest::Approx(a * (1.0 - a) * f * (1.0 - f) / ((a - f) * (a - f)))
                  .epsilon(1e-11));
        CHECK(1.0 / (1.0 - e) ==
              doctest::Approx(a * (1.0 - f) / (a - f)).epsilon(1e-11));
    }
}

TEST_CASE("decay rate requires an investment-grade attachment") {
    CHECK(rate_I(0.1, 0.03) == doctest::Approx(hbar(0.1, 0.03)));
    CHECK_THROWS_AS(rate_I(0.05, 0.05), AssumptionViolated);
    CHECK_THROWS_AS(rate_I(0.02, 0.05), AssumptionViolated);
}

TEST_CASE("tilted split scales the two windows") {
    const DefaultCurve c = DefaultCurve::flat_hazard(0.0060918414969417148);
    const double f = c.cdf_left_limit(5.0);
    const TiltedMeasure t = tilted_split(c, 0.1, 5.0);
    CHECK(t.f_t_minus == doctest::Approx(f));
    CHECK(t.scale_before == doctest::Approx(0.1 / f));
    CHECK(t.scale_after == doctest::Approx(0.9 / (1.0 - f)));
    CHECK(t.t_expiry == 5.0);

    const DefaultCurve none =
        DefaultCurve::tabulated({0.0}, {0.0}, TabulatedInterp::Step);
    CHECK_THROWS_AS(tilted_split(none, 0.1, 5.0), DegenerateCurve);
    const DefaultCurve all =
        DefaultCurve::tabulated({0.0, 0.1}, {0.0, 1.0}, TabulatedInterp::Step);
    CHECK_THROWS_AS(tilted_split(all, 0.99, 5.0), DegenerateCurve);
}

TEST_CASE("duality gap is nonnegative and tight at the tilted optimum") {
    RngStream stream(123, 0);
    for (int i = 0; i < 1000; ++i) {
        const double phi_b = 6.0 * (stream.next_uniform() - 0.5);
        const double phi_a = 6.0 * (stream.next_uniform() - 0.5);
        const double mpb = 0.01 + 0.98 * stream.next_uniform();
        const double mb = 0.01 + 0.98 * stream.next_uniform();
        const TwoPointLaw mu_prime{mpb, 1.0 - mpb};
        const TwoPointLaw mu{mb, 1.0 - mb};
        CHECK(entropy_dual_gap(phi_b, phi_a, mu_prime, mu) >= -1e-12);
    }
    // At phi = ln(d mu'/d mu) the variational bound is attained.
    const double a = 0.1, f = 0.03;
    const double gap = entropy_dual_gap(std::log(a / f), std::log((1.0 - a) / (1.0 - f)),
                                        {a, 1.0 - a}, {f, 1.0 - f});
    CHECK(gap == doctest::Approx(0.0).epsilon(1e-12));
}
