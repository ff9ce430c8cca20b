#pragma once

#include <cstddef>
#include <vector>

#include "ldpcdo/ldp.hpp"
#include "ldpcdo/normal.hpp"

namespace ldpcdo {

/// Tranche contract: attachment/detachment fractions, expiry, premium
/// schedule, riskless rate.
struct TrancheSpec {
    double alpha;
    double beta;
    double t_expiry;
    std::vector<double> payment_dates;
    double riskless_rate;

    void validate() const;

    /// Sum of premium-date discount factors.
    double premium_discount_sum() const;

    /// {0.25, 0.5, ..., T} schedule.
    static std::vector<double> quarterly_dates(double t_expiry);
};

/// Lattice correction ceil(n*alpha) - n*alpha in [0,1); exactly 0 when
/// n*alpha is an integer (snapped to 1e-9 relative to guard against
/// float rounding at the attachment boundary).
double granularity(long n, double alpha);

/// Smallest default count k with k > n*alpha (the count at which the
/// tranche first takes a loss). Uses the same integer snapping.
long first_loss_count(long n, double alpha);

/// Closed-form leading-order price, stored decomposed so callers can
/// report log-prices without underflow:
/// value = prefactor * exp(-kappa*granularity) * bracket * exp(-exponent).
struct AsymptoticPrice {
    double value;
    double log_value;     // natural log of value
    double exponent;      // n * I(alpha) in nats
    double prefactor;
    double granularity;
    double bracket;       // e^{-k}/(1-e^{-k})^2 + granularity/(1-e^{-k})
};

/// Leading-order expected protection-leg value with the vanishing error
/// term set to zero.
AsymptoticPrice protection_leg_asymptotic(long n, const TrancheSpec& tranche,
                                          double f_t_minus);

/// Leading-order par spread: protection leg over the limit premium leg
/// sum of discounted dates.
AsymptoticPrice spread_asymptotic(long n, const TrancheSpec& tranche, double f_t_minus);

/// The "theoretical" price S*_n: the spread with the rate-independent
/// prefactor e^{-RT}/(sum e^{-Rt} (beta-alpha) sqrt(2pi)) removed.
double theoretical_price_star(long n, double alpha, double f_t_minus);
double theoretical_price_star_log(long n, double alpha, double f_t_minus);

/// Truncated tilted geometric sum, its closed form, and the analytic bound
/// on their difference.
struct GeometricSums {
    double truncated;    // sum over s in S_n, s <= n^{1/4}, of s * e^{-kappa s}
    double closed_form;  // e^{-kg}{e^{-k}/(1-e^{-k})^2 + g/(1-e^{-k})}
    double bound;        // 4 e^{-1} exp(-(k/2)(n^{1/4}-1)) / (k (1-e^{-k})^2)
};
GeometricSums tilted_geometric_sum(long n, double alpha, double kappa_nats);

/// Finite-state systemic mixture: weight p(x) and conditional before-expiry
/// default probability f_x per state.
struct MixtureState {
    double weight;
    double f;  // mu([0,T), x)
};

struct MixtureStates {
    std::vector<MixtureState> states;
    void validate() const;                    // weights positive, sum 1 within 1e-12
    void validate_investment_grade(double alpha) const;  // max f_x < alpha
};

/// Weighted sum of per-state leading-order protection values.
double mixture_protection_asymptotic(long n, const TrancheSpec& tranche,
                                     const MixtureStates& states);

/// State minimizing hbar(alpha, f_x); a tie within 1e-12 is an error.
std::size_t dominant_state(const MixtureStates& states, double alpha);

/// Single-term approximation: dominant state's contribution alone.
double dominant_state_protection(long n, const TrancheSpec& tranche,
                                 const MixtureStates& states);

/// Discretized Gaussian one-factor copula: grid x_i = i/M for |i| <= M^2,
/// Gaussian cell weights with tail lumps at the ends, and conditional
/// default probability Phi((Phi^{-1}(p) - rho x_i)/sqrt(1-rho^2)).
MixtureStates gaussian_copula_states(double p_default, double rho, int m);

}  // namespace ldpcdo
