#pragma once

#include <vector>

#include "ldpcdo/models.hpp"
#include "ldpcdo/pricer.hpp"

namespace ldpcdo {
namespace oracle {

/// log Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms; about 13 correct digits).
double log_gamma(double x);

/// log C(n, k) via log_gamma.
double log_binomial_coefficient(long n, long k);

/// Binomial(n, p) point mass at k, computed in log space.
double binomial_pmf(long n, double p, long k);

/// P{Bin(n, p) >= k_min}, exact sum from whichever tail is smaller.
double binomial_upper_tail(long n, double p, long k_min);

/// P{Bin(n, p) > n*threshold} with the boundary count snapped to an integer
/// when n*threshold is within 1e-9 relative of one.
double binomial_tail(long n, double p, double threshold);

/// Max over integer k with 0 <= k - n*alpha <= n^{1/4} of the local-CLT
/// pointwise error |pmf(n, alpha, k) * sqrt(2 pi n a (1-a)) - 1|.
double local_clt_scan(long n, double alpha);

/// A finite law on [0, inf]: atoms (time, weight), weights sum to 1.
/// kNeverTime is a legal atom time.
struct DiscreteLaw {
    std::vector<double> times;
    std::vector<double> weights;
};

/// Brute-force minimizer of the constrained entropy problem for a finite
/// law: minimize H(mu'|mu) over laws mu' on the same atoms with
/// mu'[0,T) >= alpha, by grid search over the before-expiry mass level and
/// within-window allocation.
struct RateMinResult {
    double min_entropy = 0.0;          // nats
    double argmin_level = 0.0;         // mu'[0,T) at the minimizer
    std::vector<double> argmin_weights;
};
RateMinResult rate_min_bruteforce(const DiscreteLaw& law, double alpha, double t_expiry,
                                  int grid = 200);

/// Exact tranche legs by enumerating multinomial pool outcomes over the
/// atoms of a finite law. Throws CombinatorialBlowup past max_outcomes.
struct ExactPrice {
    double protection = 0.0;
    double premium = 0.0;
    double spread = 0.0;
    long n_outcomes = 0;
};
ExactPrice enumerate_exact_price(const DiscreteLaw& law, const TrancheSpec& tranche,
                                 long n, long max_outcomes = 1000000);

/// Reads the atoms out of a step-interpolated tabulated curve.
DiscreteLaw discrete_law_from_curve(const DefaultCurve& curve);

}  // namespace oracle
}  // namespace ldpcdo
