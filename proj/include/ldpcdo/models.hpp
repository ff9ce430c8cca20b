#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "ldpcdo/rng.hpp"

namespace ldpcdo {

/// Time value standing for "never defaults".
inline constexpr double kNeverTime = std::numeric_limits<double>::infinity();

/// One piece of a piecewise-constant hazard: rate `lambda` applies on
/// [previous `until`, `until`). The last segment's rate extends to infinity.
struct HazardSegment {
    double until;
    double lambda;
};

struct ReducedFormParams {
    std::vector<HazardSegment> segments;
};

/// First-passage default model: unit initial value, volatility sigma,
/// risk-neutral drift theta, bankruptcy barrier K in (0,1).
struct MertonParams {
    double sigma;
    double theta;
    double barrier;
};

enum class TabulatedInterp { Step, Linear };

struct TabulatedParams {
    std::vector<double> times;  // strictly increasing, times[0] == 0
    std::vector<double> cdf;    // nondecreasing, in [0,1]
    TabulatedInterp interp = TabulatedInterp::Step;
};

/// Marginal default-time law on [0, inf]. Immutable after construction and
/// safe to share across threads.
class DefaultCurve {
public:
    static DefaultCurve reduced_form(std::vector<HazardSegment> segments);
    static DefaultCurve flat_hazard(double lambda);
    static DefaultCurve merton(double sigma, double theta, double barrier);
    static DefaultCurve tabulated(std::vector<double> times, std::vector<double> cdf,
                                  TabulatedInterp interp = TabulatedInterp::Step);

    /// F(t) = mu[0,t]; zero for t < 0.
    double cdf(double t) const;

    /// Left limit F(t-) = sup_{s<t} F(s); requires t > 0.
    double cdf_left_limit(double t) const;

    /// Left-continuous generalized inverse: inf{t : F(t) >= q}, q in [0, total_mass()].
    double quantile(double q) const;

    /// lim_{t -> inf} F(t); mass at infinity is 1 - total_mass().
    double total_mass() const;
    double mass_at_infinity() const { return 1.0 - total_mass(); }

    /// Inverse-CDF draw; returns kNeverTime with probability mass_at_infinity().
    double sample_default_time(RngStream& stream) const;

    const ReducedFormParams* as_reduced_form() const { return std::get_if<ReducedFormParams>(&law_); }
    const MertonParams* as_merton() const { return std::get_if<MertonParams>(&law_); }
    const TabulatedParams* as_tabulated() const { return std::get_if<TabulatedParams>(&law_); }

private:
    explicit DefaultCurve(std::variant<ReducedFormParams, MertonParams, TabulatedParams> law);

    std::variant<ReducedFormParams, MertonParams, TabulatedParams> law_;
    double total_mass_ = 1.0;
};

/// Diagnostics for the investment-grade and no-flat-CDF assumptions.
struct AssumptionReport {
    double f_t_minus = 0.0;             // F(T-)
    bool ig_ok = false;                 // alpha > F(T-)
    bool density_ok = false;            // F not flat immediately left of T
    std::optional<double> chebychev_bound;  // present only when ig_ok
};

/// Probes alpha > F(T-), the no-flat condition on a dyadic grid T - T/2^k,
/// and the Chebychev bound (sigma^N)^2/(alpha - mu^N)^2 for a pool of size n.
AssumptionReport validate_assumptions(const DefaultCurve& curve, double alpha,
                                      double t_expiry, long n);

/// Both legs of a single-name CDS under a flat hazard, per unit spread:
/// premium_unit = sum_t e^{-Rt} e^{-lambda t}, protection = closed-form
/// integral of e^{-Rs} lambda e^{-lambda s} over [0,T).
struct CdsLegs {
    double protection;
    double premium_unit;
};
CdsLegs flat_hazard_cds_legs(double lambda, const std::vector<double>& payment_dates,
                             double riskless_rate, double t_expiry);

/// Solves for the constant hazard matching a quoted CDS spread.
/// Bisection on lambda in (1e-12, 10] with a secant polish; relative
/// residual below 1e-12.
DefaultCurve calibrate_flat_hazard(double spread, const std::vector<double>& payment_dates,
                                   double riskless_rate, double t_expiry);

}  // namespace ldpcdo
