#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/models.hpp"
#include "ldpcdo/oracle.hpp"
#include "ldpcdo/pricer.hpp"

using namespace ldpcdo;

TEST_CASE("log-gamma accuracy") {
    for (double x : {0.1, 0.7, 1.0, 2.0, 3.5, 10.0, 123.456, 5000.0, 1e6}) {
        CHECK(oracle::log_gamma(x) ==
              doctest::Approx(std::lgamma(x)).epsilon(5e-13));
    }
    CHECK(oracle::log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(oracle::log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK_THROWS_AS(oracle::log_gamma(0.0), InvalidParameter);
}

TEST_CASE("binomial pmf") {
    CHECK(oracle::binomial_pmf(2, 0.5, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(oracle::binomial_pmf(10000, 0.1, 1000) ==
          doctest::Approx(0.013296955574587914).epsilon(1e-12));
    CHECK(oracle::binomial_pmf(10, 0.0, 0) == 1.0);
    CHECK(oracle::binomial_pmf(10, 1.0, 10) == 1.0);
    CHECK(oracle::binomial_pmf(10, 0.3, 11) == 0.0);

    long double total = 0.0L;
    for (long k = 0; k <= 10000; ++k) total += oracle::binomial_pmf(10000, 0.1, k);
    CHECK(std::abs(static_cast<double>(total) - 1.0) < 1e-12);
}

TEST_CASE("binomial tail") {
    CHECK(oracle::binomial_tail(50, 0.08, 1.0) == 0.0);
    CHECK(oracle::binomial_tail(50, 0.08, 1.5) == 0.0);
    CHECK(oracle::binomial_tail(50, 0.08, 0.12) ==
          doctest::Approx(0.10187178095729703).epsilon(1e-13));
    // P{X >= k} equals the regularized incomplete beta I_p(k, n-k+1).
    for (long n : {20L, 50L, 400L}) {
        for (double p : {0.05, 0.3, 0.7}) {
            for (long k = 1; k <= n; k += std::max(1L, n / 7)) {
                CHECK(oracle::binomial_upper_tail(n, p, k) ==
                      doctest::Approx(boost::math::ibeta(
                                          static_cast<double>(k),
                                          static_cast<double>(n - k + 1), p))
                          .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("local limit scan values") {
    CHECK(oracle::local_clt_scan(100, 0.1) ==
          doctest::Approx(0.44125680522903326).epsilon(1e-10));
    CHECK(oracle::local_clt_scan(1000, 0.1) ==
          doctest::Approx(0.14725515514280001).epsilon(1e-10));
    CHECK(oracle::local_clt_scan(10000, 0.1) ==
          doctest::Approx(0.058136125253285404).epsilon(1e-10));
    CHECK(oracle::local_clt_scan(10000, 0.5) ==
          doctest::Approx(0.019823884199235183).epsilon(1e-10));
    // The pointwise error at the central count is tiny at alpha = 1/2.
    const double central =
        std::abs(oracle::binomial_pmf(10000, 0.5, 5000) *
                     std::sqrt(2.0 * std::acos(-1.0) * 10000 * 0.25) -
                 1.0);
    CHECK(central < 1e-3);
}

TEST_CASE("entropy minimizer edge cases") {
    oracle::DiscreteLaw law;
    law.times = {1.0, 2.0, kNeverTime};
    law.weights = {0.02, 0.03, 0.95};
    SUBCASE("constraint already satisfied") {
        const auto r = oracle::rate_min_bruteforce(law, 0.05, 5.0, 50);
        CHECK(r.min_entropy == 0.0);
        CHECK(r.argmin_weights == law.weights);
    }
    SUBCASE("grid minimum dominates the closed form") {
        const auto r = oracle::rate_min_bruteforce(law, 0.1, 5.0, 40);
        CHECK(r.min_entropy >= hbar(0.1, 0.05) - 1e-12);
        CHECK(r.min_entropy == doctest::Approx(hbar(0.1, 0.05)).epsilon(1e-4));
    }
    SUBCASE("infeasible when nothing can move before expiry") {
        oracle::DiscreteLaw after_only;
        after_only.times = {6.0, kNeverTime};
        after_only.weights = {0.5, 0.5};
        CHECK_THROWS_AS(oracle::rate_min_bruteforce(after_only, 0.1, 5.0, 40),
                        AssumptionViolated);
    }
}

TEST_CASE("exhaustive enumeration: one name, one atom in window") {
    oracle::DiscreteLaw law;
    const double q = 0.3;
    law.times = {0.5, kNeverTime};
    law.weights = {q, 1.0 - q};
    TrancheSpec tr{1e-9, 1.0, 1.0, {1.0}, 0.0};
    const auto exact = oracle::enumerate_exact_price(law, tr, 1);
    CHECK(exact.n_outcomes == 2);
    CHECK(exact.protection == doctest::Approx(q).epsilon(1e-9));
    CHECK(exact.premium == doctest::Approx(1.0 - q).epsilon(1e-9));
    CHECK(exact.spread == doctest::Approx(q / (1.0 - q)).epsilon(1e-9));
}

TEST_CASE("exhaustive enumeration properties") {
    oracle::DiscreteLaw law;
    law.times = {0.5, 2.0, kNeverTime};
    law.weights = {0.2, 0.3, 0.5};
    TrancheSpec tr{0.1, 0.4, 5.0, TrancheSpec::quarterly_dates(5.0), 0.05};
    const auto exact = oracle::enumerate_exact_price(law, tr, 10);
    CHECK(exact.n_outcomes == 66);
    CHECK(exact.protection > 0.0);
    CHECK(exact.protection < 1.0);
    // The exceedance probability bounds the undiscounted protection value.
    CHECK(exact.protection <= oracle::binomial_tail(10, 0.5, tr.alpha));

    // All mass after expiry prices to zero protection.
    oracle::DiscreteLaw late;
    late.times = {6.0, kNeverTime};
    late.weights = {0.5, 0.5};
    const auto zero = oracle::enumerate_exact_price(late, tr, 5);
    CHECK(zero.protection == 0.0);
    CHECK(zero.premium == doctest::Approx(tr.premium_discount_sum()).epsilon(1e-12));

    // Too many outcomes is refused up front.
    oracle::DiscreteLaw wide;
    wide.times = {0.5, 1.0, 1.5, 2.0, kNeverTime};
    wide.weights = {0.1, 0.1, 0.1, 0.1, 0.6};
    CHECK_THROWS_AS(oracle::enumerate_exact_price(wide, tr, 100),
                    CombinatorialBlowup);
}

TEST_CASE("atom extraction from a step curve") {
    const DefaultCurve curve = DefaultCurve::tabulated(
        {0.0, 0.5, 2.0}, {0.0, 0.2, 0.5}, TabulatedInterp::Step);
    const oracle::DiscreteLaw law = oracle::discrete_law_from_curve(curve);
    REQUIRE(law.times.size() == 3);
    CHECK(law.times[0] == 0.5);
    CHECK(law.times[1] == 2.0);
    CHECK(law.times[2] == kNeverTime);
    CHECK(law.weights[0] == doctest::Approx(0.2));
    CHECK(law.weights[1] == doctest::Approx(0.3));
    CHECK(law.weights[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(
        oracle::discrete_law_from_curve(DefaultCurve::flat_hazard(0.1)),
        InvalidParameter);
}
