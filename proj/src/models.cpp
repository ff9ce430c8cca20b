#include "ldpcdo/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ldpcdo/errors.hpp"

namespace ldpcdo {

namespace {

constexpr double kMertonHorizon = 1e4;  // years; F beyond this counts as mass at infinity
constexpr double kMertonTol = 1e-12;

double merton_density(const MertonParams& p, double t) {
    if (t <= 0.0) return 0.0;
    const double b = std::log(1.0 / p.barrier);
    const double drift = p.theta - 0.5 * p.sigma * p.sigma;
    const double s2t = p.sigma * p.sigma * t;
    const double z = drift * t + b;
    return b / std::sqrt(2.0 * M_PI * s2t * t * t) * std::exp(-z * z / (2.0 * s2t));
}

double merton_cdf(const MertonParams& p, double t) {
    if (t <= 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    const double v = gauss_kronrod<double, 15>::integrate(
        [&](double s) { return merton_density(p, s); }, 0.0, std::min(t, kMertonHorizon),
        12, kMertonTol);
    return std::min(v, 1.0);
}

// Cumulative hazard of a piecewise-constant rate.
double cumulative_hazard(const ReducedFormParams& p, double t) {
    double h = 0.0;
    double prev = 0.0;
    for (const auto& seg : p.segments) {
        if (t <= seg.until) return h + seg.lambda * (t - prev);
        h += seg.lambda * (seg.until - prev);
        prev = seg.until;
    }
    return h + p.segments.back().lambda * (t - prev);
}

// Inverse of the cumulative hazard (piecewise linear, strictly increasing).
double inverse_cumulative_hazard(const ReducedFormParams& p, double h) {
    double acc = 0.0;
    double prev = 0.0;
    for (const auto& seg : p.segments) {
        const double piece = seg.lambda * (seg.until - prev);
        if (h <= acc + piece) return prev + (h - acc) / seg.lambda;
        acc += piece;
        prev = seg.until;
    }
    return prev + (h - acc) / p.segments.back().lambda;
}

double tabulated_cdf(const TabulatedParams& p, double t) {
    if (t < p.times.front()) return 0.0;
    const auto it = std::upper_bound(p.times.begin(), p.times.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - p.times.begin()) - 1;
    if (p.interp == TabulatedInterp::Step || idx + 1 >= p.times.size()) return p.cdf[idx];
    const double w = (t - p.times[idx]) / (p.times[idx + 1] - p.times[idx]);
    return p.cdf[idx] + w * (p.cdf[idx + 1] - p.cdf[idx]);
}

}  // namespace

DefaultCurve::DefaultCurve(std::variant<ReducedFormParams, MertonParams, TabulatedParams> law)
    : law_(std::move(law)) {
    if (const auto* t = as_tabulated()) {
        total_mass_ = t->cdf.back();
    } else if (const auto* m = as_merton()) {
        total_mass_ = merton_cdf(*m, kMertonHorizon);
    } else {
        total_mass_ = 1.0;  // positive hazard on the whole half-line
    }
}

DefaultCurve DefaultCurve::reduced_form(std::vector<HazardSegment> segments) {
    if (segments.empty()) throw InvalidParameter("reduced_form: no hazard segments");
    double prev = 0.0;
    for (const auto& seg : segments) {
        if (!(seg.lambda > 0.0)) throw InvalidParameter("reduced_form: hazard must be positive");
        if (!(seg.until > prev)) throw InvalidParameter("reduced_form: segment ends must increase");
        prev = seg.until;
    }
    return DefaultCurve(ReducedFormParams{std::move(segments)});
}

DefaultCurve DefaultCurve::flat_hazard(double lambda) {
    return reduced_form({{std::numeric_limits<double>::infinity(), lambda}});
}

DefaultCurve DefaultCurve::merton(double sigma, double theta, double barrier) {
    if (!(sigma > 0.0)) throw InvalidParameter("merton: sigma must be positive");
    if (!(barrier > 0.0 && barrier < 1.0)) throw InvalidParameter("merton: barrier must be in (0,1)");
    if (!std::isfinite(theta)) throw InvalidParameter("merton: theta must be finite");
    return DefaultCurve(MertonParams{sigma, theta, barrier});
}

DefaultCurve DefaultCurve::tabulated(std::vector<double> times, std::vector<double> cdf,
                                     TabulatedInterp interp) {
    if (times.size() != cdf.size() || times.empty())
        throw InvalidParameter("tabulated: times/cdf size mismatch or empty");
    if (times.front() != 0.0) throw InvalidParameter("tabulated: grid must start at t=0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw InvalidParameter("tabulated: times must be strictly increasing");
        if (!(cdf[i] >= 0.0 && cdf[i] <= 1.0))
            throw InvalidParameter("tabulated: cdf values must be in [0,1]");
        if (i > 0 && cdf[i] < cdf[i - 1])
            throw InvalidParameter("tabulated: cdf must be nondecreasing");
    }
    return DefaultCurve(TabulatedParams{std::move(times), std::move(cdf), interp});
}

double DefaultCurve::cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (const auto* rf = as_reduced_form()) return -std::expm1(-cumulative_hazard(*rf, t));
    if (const auto* m = as_merton()) return merton_cdf(*m, t);
    return tabulated_cdf(*as_tabulated(), t);
}

double DefaultCurve::cdf_left_limit(double t) const {
    if (!(t > 0.0)) throw InvalidParameter("cdf_left_limit: t must be positive");
    const auto* tab = as_tabulated();
    if (!tab || tab->interp == TabulatedInterp::Linear) return cdf(t);
    // Step curve: value at the largest grid point strictly below t.
    const auto it = std::lower_bound(tab->times.begin(), tab->times.end(), t);
    if (it == tab->times.begin()) return 0.0;
    return tab->cdf[static_cast<std::size_t>(it - tab->times.begin()) - 1];
}

double DefaultCurve::total_mass() const { return total_mass_; }

double DefaultCurve::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile: q must be in [0,1]");
    if (q > total_mass_) return kNeverTime;
    if (const auto* rf = as_reduced_form())
        return inverse_cumulative_hazard(*rf, -std::log1p(-q));
    if (const auto* m = as_merton()) {
        double lo = 0.0, hi = kMertonHorizon;
        for (int i = 0; i < 80 && hi - lo > 1e-13 * (1.0 + hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            (merton_cdf(*m, mid) >= q ? hi : lo) = mid;
        }
        return hi;
    }
    const auto* tab = as_tabulated();
    if (tab->interp == TabulatedInterp::Step) {
        for (std::size_t i = 0; i < tab->times.size(); ++i)
            if (tab->cdf[i] >= q) return tab->times[i];
        return kNeverTime;
    }
    if (q <= tab->cdf.front()) return tab->times.front();
    for (std::size_t i = 1; i < tab->times.size(); ++i) {
        if (tab->cdf[i] >= q) {
            const double dq = tab->cdf[i] - tab->cdf[i - 1];
            if (dq == 0.0) return tab->times[i - 1];
            const double w = (q - tab->cdf[i - 1]) / dq;
            return tab->times[i - 1] + w * (tab->times[i] - tab->times[i - 1]);
        }
    }
    return kNeverTime;
}

double DefaultCurve::sample_default_time(RngStream& stream) const {
    const double u = stream.next_uniform();
    if (u > total_mass_) return kNeverTime;
    return quantile(u);
}

AssumptionReport validate_assumptions(const DefaultCurve& curve, double alpha,
                                      double t_expiry, long n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("validate_assumptions: alpha must be in (0,1)");
    if (!(t_expiry > 0.0)) throw InvalidParameter("validate_assumptions: t_expiry must be positive");
    if (n < 1) throw InvalidParameter("validate_assumptions: pool size must be >= 1");

    AssumptionReport r;
    r.f_t_minus = curve.cdf_left_limit(t_expiry);
    r.ig_ok = alpha > r.f_t_minus;

    // No-flat probe at resolution T/1024: F(T-) - F(T - T/2^k) must be
    // positive for every k in 1..10.
    r.density_ok = true;
    double delta = t_expiry / 2.0;
    for (int k = 0; k < 10; ++k, delta /= 2.0) {
        if (!(r.f_t_minus - curve.cdf(t_expiry - delta) > 0.0)) {
            r.density_ok = false;
            break;
        }
    }

    if (r.ig_ok) {
        const double var = r.f_t_minus * (1.0 - r.f_t_minus) / static_cast<double>(n);
        const double gap = alpha - r.f_t_minus;
        r.chebychev_bound = var / (gap * gap);
    }
    return r;
}

CdsLegs flat_hazard_cds_legs(double lambda, const std::vector<double>& payment_dates,
                             double riskless_rate, double t_expiry) {
    CdsLegs legs{0.0, 0.0};
    for (double t : payment_dates)
        legs.premium_unit += std::exp(-(riskless_rate + lambda) * t);
    // int_0^T e^{-Rs} lambda e^{-lambda s} ds
    const double a = riskless_rate + lambda;
    legs.protection = lambda / a * -std::expm1(-a * t_expiry);
    return legs;
}

DefaultCurve calibrate_flat_hazard(double spread, const std::vector<double>& payment_dates,
                                   double riskless_rate, double t_expiry) {
    if (!(spread > 0.0)) throw InvalidParameter("calibrate: spread must be positive");
    if (payment_dates.empty()) throw InvalidParameter("calibrate: no payment dates");
    for (double t : payment_dates)
        if (!(t > 0.0 && t <= t_expiry))
            throw InvalidParameter("calibrate: payment dates must lie in (0, T]");
    if (!(riskless_rate >= 0.0)) throw InvalidParameter("calibrate: riskless rate must be >= 0");
    if (!(t_expiry > 0.0)) throw InvalidParameter("calibrate: t_expiry must be positive");

    // Residual of S * premium_unit(lambda) = protection(lambda).
    const auto residual = [&](double lam) {
        const CdsLegs legs = flat_hazard_cds_legs(lam, payment_dates, riskless_rate, t_expiry);
        return legs.protection - spread * legs.premium_unit;
    };

    double lo = 1e-12, hi = 10.0;
    if (residual(lo) > 0.0) throw InvalidParameter("calibrate: spread below attainable range");
    if (residual(hi) < 0.0) throw NoRoot("calibrate: spread exceeds the leg ratio at lambda=10");

    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) >= 0.0 ? hi : lo) = mid;
    }
    // Secant polish.
    double lam = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-7 * lam;
        const double f0 = residual(lam);
        const double d = (residual(lam + h) - residual(lam - h)) / (2.0 * h);
        if (d == 0.0) break;
        lam -= f0 / d;
    }

    const CdsLegs legs = flat_hazard_cds_legs(lam, payment_dates, riskless_rate, t_expiry);
    if (std::abs(legs.protection - spread * legs.premium_unit) >
        1e-12 * std::max(legs.protection, spread * legs.premium_unit))
        throw NoRoot("calibrate: residual did not converge");
    return DefaultCurve::flat_hazard(lam);
}

}  // namespace ldpcdo
