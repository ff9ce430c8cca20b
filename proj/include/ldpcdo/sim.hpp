#pragma once

#include <cstdint>
#include <vector>

#include "ldpcdo/ldp.hpp"
#include "ldpcdo/models.hpp"
#include "ldpcdo/pricer.hpp"
#include "ldpcdo/rng.hpp"

namespace ldpcdo {

/// One realization of the pool: per-name default times plus the derived
/// views the leg valuations need.
struct Scenario {
    long pool_size = 0;
    double t_expiry = 0.0;
    std::vector<double> default_times;    // name order; kNeverTime for no default
    std::vector<double> sorted_in_window; // finite times <= t_expiry, ascending
    long defaults_before_expiry = 0;      // count of times strictly < t_expiry

    /// Canonical scenario from explicit times (used by the enumeration oracle).
    static Scenario from_times(std::vector<double> times, double t_expiry);
};

/// n i.i.d. draws from the curve.
Scenario simulate_scenario(const DefaultCurve& curve, long n, double t_expiry,
                           RngStream& stream);

/// n i.i.d. draws from the tilted law: Bernoulli(alpha) for {tau < T}, then
/// tau from the base law restricted to [0,T) or [T,inf].
Scenario simulate_scenario(const DefaultCurve& curve, const TiltedMeasure& tilted,
                           long n, RngStream& stream);

/// Discounted Stieltjes sum of tranched-loss increments over [0, T).
double protection_leg_value(const Scenario& scenario, const TrancheSpec& tranche);

/// Sum over payment dates of e^{-Rt} (1 - tranched loss at t).
double premium_leg_value(const Scenario& scenario, const TrancheSpec& tranche);

enum class SimMode { Plain, Tilted };

/// Monte Carlo point estimate.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::Plain;
};

struct McResult {
    Estimate prot;
    Estimate prem;
    double spread = 0.0;
    double spread_std_error = 0.0;  // delta method on the leg ratio
};

/// Plain Monte Carlo of both legs under the physical measure.
McResult mc_price(const DefaultCurve& curve, const TrancheSpec& tranche, long n,
                  long n_paths, std::uint64_t seed);

/// Importance-sampled protection-leg price under the tilted measure.
struct IsResult {
    Estimate weighted;       // estimate of I_n = E~[P e^{-kappa gamma} 1{gamma>0}]
    double price = 0.0;      // weighted.mean * exp(-n I(alpha)); may underflow
    double log_price = 0.0;  // ln(weighted.mean) - n I(alpha)
    double price_std_error = 0.0;
    double relative_std_error = 0.0;
    double rate = 0.0;   // I(alpha)
    double kappa = 0.0;
};
IsResult is_price(const DefaultCurve& curve, const TrancheSpec& tranche, long n,
                  long n_paths, std::uint64_t seed);

/// Per-bucket tilted-measure diagnostics, keyed by the default count d
/// (excess s = d - n*alpha).
struct TiltBucket {
    long defaults = 0;            // d
    double excess = 0.0;          // s = d - n*alpha
    long hits = 0;
    double mean_prot = 0.0;               // empirical H_n(s)
    double prot_ratio = 0.0;              // vs e^{-RT} s / ((beta-alpha) n)
    double mean_time_to_expiry = 0.0;     // E[T - first tranche-loss time | s]
    double pmf = 0.0;
    double pmf_ratio = 0.0;               // vs 1/sqrt(2 pi n a (1-a))
};

struct TiltDiagnostics {
    std::vector<TiltBucket> buckets;   // only buckets with hits
    double frac_before_expiry = 0.0;   // empirical P{tau < T} per name
    long n_paths = 0;
};

TiltDiagnostics tilt_diagnostics(const DefaultCurve& curve, const TrancheSpec& tranche,
                                 long n, long n_paths, std::uint64_t seed,
                                 int n_buckets = 8);

}  // namespace ldpcdo
