#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/pricer.hpp"

using namespace ldpcdo;

namespace {

TrancheSpec worked_tranche() {
    return {0.1, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.0};
}

}  // namespace

TEST_CASE("normal CDF and quantile") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.96) == doctest::Approx(0.97500210485177957).epsilon(1e-15));
    CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    // Above x of about 5 the upper-tail CDF loses resolution in double
    // precision, so the round trip is only meaningful on the lower side.
    for (double x = -8.0; x <= 5.0; x += 0.25)
        CHECK(std_normal_quantile(std_normal_cdf(x)) ==
              doctest::Approx(x).epsilon(1e-11));
    CHECK_THROWS_AS(std_normal_quantile(0.0), InvalidParameter);
    CHECK_THROWS_AS(std_normal_quantile(1.0), InvalidParameter);
}

TEST_CASE("lattice correction and first loss count") {
    CHECK(granularity(100, 0.1) == 0.0);
    CHECK(granularity(101, 0.1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(first_loss_count(100, 0.1) == 11);
    CHECK(first_loss_count(101, 0.1) == 11);
    // 50 * 0.06 is 3.0000000000000004 in floating point; snapping keeps the
    // attachment integral.
    CHECK(granularity(50, 0.06) == 0.0);
    CHECK(first_loss_count(50, 0.06) == 4);
}

TEST_CASE("closed-form protection value on the reference configuration") {
    // n=100, alpha=0.1, beta=0.2, F(T-)=0.03, R=0.
    const AsymptoticPrice p = protection_leg_asymptotic(100, worked_tranche(), 0.03);
    CHECK(p.granularity == 0.0);
    CHECK(p.exponent == doctest::Approx(5.2986103076787619).epsilon(1e-13));
    CHECK(p.prefactor == doctest::Approx(0.013298076013381089).epsilon(1e-13));
    CHECK(p.bracket == doctest::Approx(0.534489795918367).epsilon(1e-13));
    CHECK(p.value == doctest::Approx(3.5528020529430019e-5).epsilon(1e-12));
    CHECK(std::exp(p.log_value) == doctest::Approx(p.value).epsilon(1e-14));
    // Decomposition: value = prefactor * e^{-kg} * bracket * e^{-exponent}.
    const double k = kappa(0.1, 0.03);
    CHECK(p.log_value == doctest::Approx(std::log(p.prefactor) - k * p.granularity +
                                         std::log(p.bracket) - p.exponent)
                             .epsilon(1e-13));
}

TEST_CASE("spread and the prefactor-free price") {
    const TrancheSpec tr = worked_tranche();
    const AsymptoticPrice prot = protection_leg_asymptotic(100, tr, 0.03);
    const AsymptoticPrice sp = spread_asymptotic(100, tr, 0.03);
    CHECK(sp.value == doctest::Approx(prot.value / tr.premium_discount_sum())
                          .epsilon(1e-14));
    CHECK(theoretical_price_star(200, 0.1, 0.03) ==
          doctest::Approx(1.5738333120155081e-8).epsilon(1e-12));
    CHECK(std::exp(theoretical_price_star_log(200, 0.1, 0.03)) ==
          doctest::Approx(theoretical_price_star(200, 0.1, 0.03)).epsilon(1e-13));
}

TEST_CASE("truncated geometric sum agrees with a direct loop") {
    for (long n : {16L, 100L, 313L}) {
        for (double a : {0.1, 0.27}) {
            const double k = kappa(a, 0.03);
            const GeometricSums g = tilted_geometric_sum(n, a, k);
            // Direct: sum of s e^{-ks} over lattice excesses s = d - n a with
            // d an integer count > n a and s <= n^{1/4}.
            const long d_min = first_loss_count(n, a);
            const double na = static_cast<double>(n) * a;
            const double cap = std::pow(static_cast<double>(n), 0.25);
            double direct = 0.0;
            for (long d = d_min; d <= n; ++d) {
                const double s = static_cast<double>(d) - na;
                if (s > cap) break;
                direct += s * std::exp(-k * s);
            }
            CHECK(g.truncated == doctest::Approx(direct).epsilon(1e-12));
            CHECK(g.bound > 0.0);
            CHECK(std::abs(g.truncated - g.closed_form) <= g.bound + 1e-15);
        }
    }
    // Closed form at zero lattice correction is e^{-k}/(1-e^{-k})^2.
    const double k = kappa(0.1, 0.03);
    CHECK(tilted_geometric_sum(100, 0.1, k).closed_form ==
          doctest::Approx(0.534489795918367).epsilon(1e-13));
}

TEST_CASE("detrended price depends only on the lattice correction") {
    // Removing the n^{-3/2} and e^{-n rate} trends leaves a function of the
    // lattice correction alone, so the series has exact period 10 at
    // alpha = 0.1 and visible variation within a period.
    const double alpha = 0.1, f = 0.03;
    const double rate = hbar(alpha, f);
    const auto detrended = [&](long n) {
        return theoretical_price_star_log(n, alpha, f) +
               1.5 * std::log(static_cast<double>(n)) +
               static_cast<double>(n) * rate;
    };
    double lo = detrended(60), hi = lo;
    for (long n = 60; n <= 120; ++n) {
        CHECK(detrended(n + 10) == doctest::Approx(detrended(n)).epsilon(1e-12));
        lo = std::min(lo, detrended(n));
        hi = std::max(hi, detrended(n));
    }
    CHECK(hi - lo > 0.05);  // the teeth are visible in log space
}

TEST_CASE("mixture validation") {
    MixtureStates ms;
    ms.states = {{0.6, 0.03}, {0.4, 0.05}};
    CHECK_NOTHROW(ms.validate());
    CHECK_NOTHROW(ms.validate_investment_grade(0.1));
    CHECK_THROWS_AS(ms.validate_investment_grade(0.04), AssumptionViolated);

    MixtureStates bad;
    bad.states = {{0.6, 0.03}, {0.5, 0.05}};
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    MixtureStates neg;
    neg.states = {{1.2, 0.03}, {-0.2, 0.05}};
    CHECK_THROWS_AS(neg.validate(), InvalidParameter);
}

TEST_CASE("single-state mixture is bit-identical to homogeneous pricing") {
    const TrancheSpec tr = worked_tranche();
    MixtureStates single;
    single.states = {{1.0, 0.03}};
    for (long n : {50L, 100L, 237L, 1000L}) {
        CHECK(mixture_protection_asymptotic(n, tr, single) ==
              protection_leg_asymptotic(n, tr, 0.03).value);
    }
}

TEST_CASE("dominant state selection") {
    const TrancheSpec tr = worked_tranche();
    MixtureStates ms;
    ms.states = {{0.5, 0.03}, {0.5, 0.05}};
    // Larger f means a smaller entropy distance to the attachment.
    CHECK(dominant_state(ms, 0.1) == 1);
    const double dom = dominant_state_protection(100, tr, ms);
    const double mix = mixture_protection_asymptotic(100, tr, ms);
    CHECK(dom == doctest::Approx(0.5 * protection_leg_asymptotic(100, tr, 0.05).value));
    CHECK(dom <= mix);
    CHECK(dom / mix > 0.9);  // the dominant state carries most of the value

    MixtureStates tie;
    tie.states = {{0.5, 0.04}, {0.5, 0.04}};
    CHECK_THROWS_AS(dominant_state(tie, 0.1), TieError);
}

TEST_CASE("discretized one-factor states") {
    const MixtureStates states = gaussian_copula_states(0.05, 0.3, 8);
    double total = 0.0;
    double prev_f = 1.0;
    for (const auto& s : states.states) {
        CHECK(s.weight >= 0.0);
        CHECK(s.f >= 0.0);
        CHECK(s.f <= 1.0);
        CHECK(s.f <= prev_f);  // conditional default probability falls in the factor
        prev_f = s.f;
        total += s.weight;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_copula_states(0.05, -0.3, 8), InvalidParameter);
    CHECK_THROWS_AS(gaussian_copula_states(0.05, 1.0, 8), InvalidParameter);
    CHECK_THROWS_AS(gaussian_copula_states(1.5, 0.3, 8), InvalidParameter);
}

TEST_CASE("tranche validation") {
    TrancheSpec tr = worked_tranche();
    CHECK_NOTHROW(tr.validate());
    tr.beta = tr.alpha;
    CHECK_THROWS_AS(tr.validate(), InvalidParameter);
    tr = worked_tranche();
    tr.payment_dates.push_back(6.0);
    CHECK_THROWS_AS(tr.validate(), InvalidParameter);
    tr = worked_tranche();
    tr.payment_dates.clear();
    CHECK_THROWS_AS(tr.validate(), InvalidParameter);
    CHECK(TrancheSpec::quarterly_dates(5.0).size() == 20);
    CHECK(TrancheSpec::quarterly_dates(5.0).front() == doctest::Approx(0.25));
    CHECK(TrancheSpec::quarterly_dates(5.0).back() == doctest::Approx(5.0));
}
