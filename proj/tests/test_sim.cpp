#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/pricer.hpp"
#include "ldpcdo/sim.hpp"

using namespace ldpcdo;

namespace {

TrancheSpec mid_tranche(double r = 0.0) {
    return {0.25, 0.75, 1.0, {1.0}, r};
}

}  // namespace

TEST_CASE("scenario bookkeeping") {
    const Scenario s = Scenario::from_times({1.5, 0.5, kNeverTime, 1.0}, 1.0);
    CHECK(s.pool_size == 4);
    CHECK(s.defaults_before_expiry == 1);  // strictly before expiry
    REQUIRE(s.sorted_in_window.size() == 2);
    CHECK(s.sorted_in_window[0] == 0.5);
    CHECK(s.sorted_in_window[1] == 1.0);
}

TEST_CASE("protection leg hand-checked values") {
    const TrancheSpec tr = mid_tranche();
    // Two names, defaults at 0.5 and 1.5, expiry 1: one in-window jump taking
    // the pool loss to 1/2, so the tranched loss is (0.5-0.25)/0.5 = 0.5.
    const Scenario s = Scenario::from_times({0.5, 1.5}, tr.t_expiry);
    CHECK(protection_leg_value(s, tr) == doctest::Approx(0.5));
    CHECK(premium_leg_value(s, tr) == doctest::Approx(0.5));

    // No defaults before expiry.
    const Scenario late = Scenario::from_times({1.5, kNeverTime}, tr.t_expiry);
    CHECK(protection_leg_value(late, tr) == 0.0);
    CHECK(premium_leg_value(late, tr) == doctest::Approx(1.0));

    // Full wipeout at time zero.
    const Scenario wipe = Scenario::from_times({0.0, 0.0}, tr.t_expiry);
    CHECK(protection_leg_value(wipe, tr) == doctest::Approx(1.0));
    CHECK(premium_leg_value(wipe, tr) == doctest::Approx(0.0));

    // A default at exactly the expiry pays nothing on the protection leg.
    const Scenario at_expiry = Scenario::from_times({1.0, 1.0}, tr.t_expiry);
    CHECK(protection_leg_value(at_expiry, tr) == 0.0);
}

TEST_CASE("discounting of the protection leg") {
    const TrancheSpec tr = mid_tranche(0.1);
    const Scenario s = Scenario::from_times({0.5, 1.5}, tr.t_expiry);
    CHECK(protection_leg_value(s, tr) ==
          doctest::Approx(0.5 * std::exp(-0.1 * 0.5)).epsilon(1e-14));
}

TEST_CASE("extra early default moves the legs the right way") {
    const TrancheSpec tr{0.1, 0.4, 5.0, TrancheSpec::quarterly_dates(5.0), 0.04};
    RngStream stream(5, 0);
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.08);
    for (int trial = 0; trial < 200; ++trial) {
        const Scenario base = simulate_scenario(curve, 20, tr.t_expiry, stream);
        // Move one name's default earlier; losses can only grow.
        std::vector<double> times = base.default_times;
        const double earlier = 5.0 * stream.next_uniform() * 0.999;
        if (earlier >= times[0]) continue;
        times[0] = earlier;
        const Scenario more = Scenario::from_times(times, tr.t_expiry);
        CHECK(protection_leg_value(more, tr) >= protection_leg_value(base, tr) - 1e-15);
        CHECK(premium_leg_value(more, tr) <= premium_leg_value(base, tr) + 1e-15);
    }
}

TEST_CASE("curve with all mass after expiry never defaults in window") {
    const DefaultCurve curve =
        DefaultCurve::tabulated({0.0, 10.0}, {0.0, 1.0}, TabulatedInterp::Step);
    const TrancheSpec tr{0.1, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.02};
    RngStream stream(11, 0);
    for (int i = 0; i < 50; ++i) {
        const Scenario s = simulate_scenario(curve, 30, tr.t_expiry, stream);
        CHECK(s.defaults_before_expiry == 0);
    }
    const McResult mc = mc_price(curve, tr, 30, 1000, 3);
    CHECK(mc.prot.mean == 0.0);
    CHECK(mc.prem.mean == doctest::Approx(tr.premium_discount_sum()).epsilon(1e-13));
    CHECK(mc.spread == 0.0);
}

TEST_CASE("tilted scenarios hit the attachment frequency") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0060918414969417148);
    const TiltedMeasure tilted = tilted_split(curve, 0.1, 5.0);
    RngStream stream(17, 0);
    long total = 0;
    const int reps = 200, n = 1000;
    for (int i = 0; i < reps; ++i)
        total += simulate_scenario(curve, tilted, n, stream).defaults_before_expiry;
    const double mean = static_cast<double>(total) / (reps * n);
    const double se = std::sqrt(0.1 * 0.9 / (reps * n));
    CHECK(std::abs(mean - 0.1) < 4.0 * se);
}

TEST_CASE("path-wise support bound for the protection leg") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0060918414969417148);
    const TrancheSpec tr{0.1, 0.15, 5.0, TrancheSpec::quarterly_dates(5.0), 0.0};
    const TiltedMeasure tilted = tilted_split(curve, tr.alpha, tr.t_expiry);
    RngStream stream(23, 0);
    const long n = 100;
    const long d_min = first_loss_count(n, tr.alpha);
    for (int i = 0; i < 500; ++i) {
        const Scenario s = simulate_scenario(curve, tilted, n, stream);
        const double p = protection_leg_value(s, tr);
        CHECK(p >= 0.0);
        CHECK(p <= (s.defaults_before_expiry >= d_min ? 1.0 : 0.0));
    }
}

TEST_CASE("estimates are reproducible across seeds and worker counts") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0166821077237412);
    const TrancheSpec tr{0.12, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.03};

    setenv("LDPCDO_THREADS", "1", 1);
    const McResult serial = mc_price(curve, tr, 50, 20000, 777);
    const IsResult serial_is = is_price(curve, tr, 50, 20000, 777);
    setenv("LDPCDO_THREADS", "3", 1);
    const McResult threaded = mc_price(curve, tr, 50, 20000, 777);
    const IsResult threaded_is = is_price(curve, tr, 50, 20000, 777);
    unsetenv("LDPCDO_THREADS");

    CHECK(serial.prot.mean == threaded.prot.mean);
    CHECK(serial.prot.std_error == threaded.prot.std_error);
    CHECK(serial.prem.mean == threaded.prem.mean);
    CHECK(serial.spread == threaded.spread);
    CHECK(serial_is.weighted.mean == threaded_is.weighted.mean);
    CHECK(serial_is.weighted.std_error == threaded_is.weighted.std_error);

    // Different seed, different answer.
    const McResult other = mc_price(curve, tr, 50, 20000, 778);
    CHECK(other.prot.mean != serial.prot.mean);
}

TEST_CASE("plain and tilted estimators agree") {
    // F(5-) = 0.08 under a flat hazard.
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0166821077237412);
    const TrancheSpec tr{0.12, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.03};
    const McResult mc = mc_price(curve, tr, 50, 200000, 41);
    const IsResult is = is_price(curve, tr, 50, 40000, 42);
    const double sigma = std::sqrt(mc.prot.std_error * mc.prot.std_error +
                                   is.price_std_error * is.price_std_error);
    CHECK(std::abs(mc.prot.mean - is.price) < 4.0 * sigma);
    CHECK(is.rate == doctest::Approx(hbar(0.12, curve.cdf_left_limit(5.0))));
    CHECK(is.relative_std_error < 0.05);
}

TEST_CASE("error scaling in the path count") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0166821077237412);
    const TrancheSpec tr{0.12, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.03};
    const McResult small = mc_price(curve, tr, 50, 50000, 900);
    const McResult big = mc_price(curve, tr, 50, 200000, 900);
    CHECK(small.prot.std_error / big.prot.std_error ==
          doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("diagnostics bucket the excess correctly") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.0102622916564426);  // F=0.05
    const TrancheSpec tr{0.1, 0.15, 5.0, TrancheSpec::quarterly_dates(5.0), 0.0};
    const TiltDiagnostics diag = tilt_diagnostics(curve, tr, 100, 20000, 55, 4);
    CHECK(diag.n_paths == 20000);
    CHECK(std::abs(diag.frac_before_expiry - 0.1) < 0.01);
    REQUIRE(!diag.buckets.empty());
    long prev_d = 0;
    for (const auto& b : diag.buckets) {
        CHECK(b.defaults > prev_d);
        prev_d = b.defaults;
        CHECK(b.excess == doctest::Approx(static_cast<double>(b.defaults) - 10.0));
        CHECK(b.hits > 0);
        CHECK(b.pmf == doctest::Approx(static_cast<double>(b.hits) / 20000.0));
        // With zero rate the conditional protection value is exactly
        // excess / ((beta - alpha) n).
        CHECK(b.prot_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("input validation") {
    const DefaultCurve curve = DefaultCurve::flat_hazard(0.01);
    const TrancheSpec tr{0.1, 0.2, 5.0, TrancheSpec::quarterly_dates(5.0), 0.0};
    CHECK_THROWS_AS(mc_price(curve, tr, 0, 100, 1), InvalidParameter);
    CHECK_THROWS_AS(mc_price(curve, tr, 10, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(is_price(curve, tr, 10, 1, 1), InvalidParameter);
}
