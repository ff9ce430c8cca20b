#pragma once

#include "ldpcdo/models.hpp"

namespace ldpcdo {

/// Bernoulli relative entropy h(a1, a2) in nats, with the four-case boundary
/// convention: a1=1 gives ln(1/a2), a1=0 gives ln(1/(1-a2)), anything else
/// outside (0,1)^2 is +infinity except h(0,0)=h(1,1)=0 (continuity extension).
double hbar(double a1, double a2);

/// Rate of exponential decay of the tranche-loss probability:
/// I(alpha) = hbar(alpha, F(T-)). Requires alpha > f_t_minus in (0,1).
double rate_I(double alpha, double f_t_minus);

/// Tilting exponent kappa = ln((alpha/(1-alpha)) * ((1-F(T-))/F(T-)));
/// strictly positive for an investment-grade tranche.
double kappa(double alpha, double f_t_minus);

/// The explicit entropy minimizer: mu scaled by alpha/F(T-) on [0,T) and by
/// (1-alpha)/(1-F(T-)) on [T,inf].
struct TiltedMeasure {
    double alpha;
    double f_t_minus;
    double scale_before;  // alpha / F(T-)
    double scale_after;   // (1-alpha) / (1-F(T-))
    double t_expiry;
};

TiltedMeasure tilted_split(const DefaultCurve& curve, double alpha, double t_expiry);

/// Probability pair (mass on [0,T), mass on [T,inf]).
struct TwoPointLaw {
    double before;
    double after;
};

/// H(mu'|mu) minus the variational value of the step function
/// phi = (phi_before on [0,T), phi_after on [T,inf]); nonnegative, zero at
/// the extremal phi*_alpha when mu' is the tilted measure.
double entropy_dual_gap(double phi_before, double phi_after,
                        const TwoPointLaw& mu_prime, const TwoPointLaw& mu);

}  // namespace ldpcdo
