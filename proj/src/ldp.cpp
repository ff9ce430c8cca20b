#include "ldpcdo/ldp.hpp"

#include <cmath>
#include <limits>

#include "ldpcdo/errors.hpp"

namespace ldpcdo {

double hbar(double a1, double a2) {
    if (!(a1 >= 0.0 && a1 <= 1.0 && a2 >= 0.0 && a2 <= 1.0))
        return std::numeric_limits<double>::infinity();
    if (a1 > 0.0 && a1 < 1.0 && a2 > 0.0 && a2 < 1.0)
        return a1 * std::log(a1 / a2) + (1.0 - a1) * std::log((1.0 - a1) / (1.0 - a2));
    if (a1 == 1.0 && a2 > 0.0 && a2 < 1.0) return -std::log(a2);
    if (a1 == 0.0 && a2 >= 0.0 && a2 < 1.0) return -std::log1p(-a2);
    if (a1 == a2) return 0.0;  // continuity extension at (0,0) and (1,1)
    return std::numeric_limits<double>::infinity();
}

namespace {

void require_investment_grade(double alpha, double f_t_minus) {
    if (!(f_t_minus > 0.0 && f_t_minus < 1.0))
        throw AssumptionViolated("F(T-) must be in (0,1)");
    if (!(alpha > f_t_minus))
        throw AssumptionViolated("investment-grade assumption requires alpha > F(T-)");
}

}  // namespace

double rate_I(double alpha, double f_t_minus) {
    require_investment_grade(alpha, f_t_minus);
    return hbar(alpha, f_t_minus);
}

double kappa(double alpha, double f_t_minus) {
    require_investment_grade(alpha, f_t_minus);
    return std::log(alpha / (1.0 - alpha) * (1.0 - f_t_minus) / f_t_minus);
}

TiltedMeasure tilted_split(const DefaultCurve& curve, double alpha, double t_expiry) {
    const double f = curve.cdf_left_limit(t_expiry);
    if (f <= 0.0 || f >= 1.0)
        throw DegenerateCurve("tilted_split: F(T-) must be in (0,1)");
    if (!(alpha > f))
        throw AssumptionViolated("tilted_split: alpha must exceed F(T-)");
    return TiltedMeasure{alpha, f, alpha / f, (1.0 - alpha) / (1.0 - f), t_expiry};
}

double entropy_dual_gap(double phi_before, double phi_after,
                        const TwoPointLaw& mu_prime, const TwoPointLaw& mu) {
    const double entropy = hbar(mu_prime.before, mu.before);
    // log-sum-exp of ln(mu_b) + phi_b and ln(mu_a) + phi_a
    const double lb = std::log(mu.before) + phi_before;
    const double la = std::log(mu.after) + phi_after;
    const double m = std::max(lb, la);
    const double log_mgf = m + std::log(std::exp(lb - m) + std::exp(la - m));
    const double dual_value =
        phi_before * mu_prime.before + phi_after * mu_prime.after - log_mgf;
    return entropy - dual_value;
}

}  // namespace ldpcdo
