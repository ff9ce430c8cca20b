#include "ldpcdo/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldpcdo/errors.hpp"

namespace ldpcdo {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidParameter("std_normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation, then one Halley step on erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double e = std_normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

void TrancheSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("tranche: alpha must be in (0,1)");
    if (!(beta > alpha && beta <= 1.0)) throw InvalidParameter("tranche: beta must be in (alpha, 1]");
    if (!(t_expiry > 0.0)) throw InvalidParameter("tranche: t_expiry must be positive");
    if (payment_dates.empty()) throw InvalidParameter("tranche: payment dates empty");
    double prev = 0.0;
    for (double t : payment_dates) {
        if (!(t > prev)) throw InvalidParameter("tranche: payment dates must be increasing and positive");
        if (t > t_expiry + 1e-12) throw InvalidParameter("tranche: payment date past expiry");
        prev = t;
    }
    if (!(riskless_rate >= 0.0)) throw InvalidParameter("tranche: riskless rate must be >= 0");
}

double TrancheSpec::premium_discount_sum() const {
    double s = 0.0;
    for (double t : payment_dates) s += std::exp(-riskless_rate * t);
    return s;
}

std::vector<double> TrancheSpec::quarterly_dates(double t_expiry) {
    std::vector<double> dates;
    for (int k = 1; 0.25 * k <= t_expiry + 1e-12; ++k) dates.push_back(0.25 * k);
    return dates;
}

namespace {

// Snap n*alpha to the nearest integer when within 1e-9 of it, so that a
// nominally integer attachment count never misclassifies.
double snapped_pool_attachment(long n, double alpha) {
    const double na = static_cast<double>(n) * alpha;
    const double r = std::nearbyint(na);
    if (std::abs(na - r) <= 1e-9 * std::max(1.0, na)) return r;
    return na;
}

}  // namespace

double granularity(long n, double alpha) {
    if (n < 1) throw InvalidParameter("granularity: n must be >= 1");
    const double na = snapped_pool_attachment(n, alpha);
    return std::ceil(na) - na;
}

long first_loss_count(long n, double alpha) {
    if (n < 1) throw InvalidParameter("first_loss_count: n must be >= 1");
    const double na = snapped_pool_attachment(n, alpha);
    const double c = std::ceil(na);
    return static_cast<long>(c) + (c == na ? 1 : 0);
}

AsymptoticPrice protection_leg_asymptotic(long n, const TrancheSpec& tranche,
                                          double f_t_minus) {
    tranche.validate();
    if (n < 1) throw InvalidParameter("protection_leg_asymptotic: n must be >= 1");
    const double a = tranche.alpha;
    const double f = f_t_minus;
    const double rate = rate_I(a, f);
    const double k = kappa(a, f);

    AsymptoticPrice p;
    p.granularity = granularity(n, a);
    p.exponent = static_cast<double>(n) * rate;
    p.prefactor = std::exp(-tranche.riskless_rate * tranche.t_expiry) /
                  (std::pow(static_cast<double>(n), 1.5) * (tranche.beta - a) *
                   std::sqrt(2.0 * M_PI * a * (1.0 - a)));
    // e^{-k}/(1-e^{-k})^2 and 1/(1-e^{-k}) via the odds-ratio identities.
    const double core = a * (1.0 - a) * f * (1.0 - f) / ((a - f) * (a - f));
    const double slope = a * (1.0 - f) / (a - f);
    p.bracket = core + p.granularity * slope;
    p.log_value = std::log(p.prefactor) - k * p.granularity + std::log(p.bracket) - p.exponent;
    p.value = std::exp(p.log_value);
    return p;
}

AsymptoticPrice spread_asymptotic(long n, const TrancheSpec& tranche, double f_t_minus) {
    AsymptoticPrice p = protection_leg_asymptotic(n, tranche, f_t_minus);
    const double divisor = tranche.premium_discount_sum();
    p.prefactor /= divisor;
    p.log_value -= std::log(divisor);
    p.value = std::exp(p.log_value);
    return p;
}

double theoretical_price_star_log(long n, double alpha, double f_t_minus) {
    if (n < 1) throw InvalidParameter("theoretical_price_star: n must be >= 1");
    const double rate = rate_I(alpha, f_t_minus);
    const double k = kappa(alpha, f_t_minus);
    const double g = granularity(n, alpha);
    const double core = alpha * (1.0 - alpha) * f_t_minus * (1.0 - f_t_minus) /
                        ((alpha - f_t_minus) * (alpha - f_t_minus));
    const double slope = alpha * (1.0 - f_t_minus) / (alpha - f_t_minus);
    return -k * g - 1.5 * std::log(static_cast<double>(n)) -
           0.5 * std::log(alpha * (1.0 - alpha)) + std::log(core + g * slope) -
           static_cast<double>(n) * rate;
}

double theoretical_price_star(long n, double alpha, double f_t_minus) {
    return std::exp(theoretical_price_star_log(n, alpha, f_t_minus));
}

GeometricSums tilted_geometric_sum(long n, double alpha, double kappa_nats) {
    if (n < 1) throw InvalidParameter("tilted_geometric_sum: n must be >= 1");
    if (!(kappa_nats > 0.0)) throw InvalidParameter("tilted_geometric_sum: kappa must be positive");

    GeometricSums r{0.0, 0.0, 0.0};
    const double na = snapped_pool_attachment(n, alpha);
    const double window = std::pow(static_cast<double>(n), 0.25);
    const long j_lo = first_loss_count(n, alpha);
    const long j_hi = std::min<long>(n, static_cast<long>(std::floor(na + window)));
    // Small terms first.
    for (long j = j_hi; j >= j_lo; --j) {
        const double s = static_cast<double>(j) - na;
        r.truncated += s * std::exp(-kappa_nats * s);
    }

    const double g = granularity(n, alpha);
    const double ek = std::exp(-kappa_nats);
    const double om = -std::expm1(-kappa_nats);  // 1 - e^{-k}
    r.closed_form = std::exp(-kappa_nats * g) * (ek / (om * om) + g / om);
    r.bound = 4.0 * std::exp(-1.0) * std::exp(-0.5 * kappa_nats * (window - 1.0)) /
              (kappa_nats * om * om);
    return r;
}

void MixtureStates::validate() const {
    if (states.empty()) throw InvalidParameter("mixture: no states");
    double sum = 0.0;
    for (const auto& s : states) {
        if (!(s.weight > 0.0)) throw InvalidParameter("mixture: weights must be positive");
        if (!(s.f > 0.0 && s.f < 1.0)) throw InvalidParameter("mixture: state f must be in (0,1)");
        sum += s.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("mixture: weights must sum to 1");
}

void MixtureStates::validate_investment_grade(double alpha) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (!(states[i].f < alpha))
            throw AssumptionViolated("mixture state " + std::to_string(i) +
                                     " violates f < alpha");
}

double mixture_protection_asymptotic(long n, const TrancheSpec& tranche,
                                     const MixtureStates& states) {
    states.validate();
    states.validate_investment_grade(tranche.alpha);
    if (states.states.size() == 1)
        return protection_leg_asymptotic(n, tranche, states.states[0].f).value;
    // Kahan summation in state order; deterministic at any thread count
    // because the order is fixed.
    double sum = 0.0, comp = 0.0;
    for (const auto& s : states.states) {
        const double term =
            s.weight * protection_leg_asymptotic(n, tranche, s.f).value;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::size_t dominant_state(const MixtureStates& states, double alpha) {
    states.validate();
    states.validate_investment_grade(alpha);
    std::size_t best = 0;
    double best_rate = hbar(alpha, states.states[0].f);
    for (std::size_t i = 1; i < states.states.size(); ++i) {
        const double r = hbar(alpha, states.states[i].f);
        if (r < best_rate) {
            best = i;
            best_rate = r;
        }
    }
    for (std::size_t i = 0; i < states.states.size(); ++i)
        if (i != best && std::abs(hbar(alpha, states.states[i].f) - best_rate) <= 1e-12)
            throw TieError("dominant_state: minimizer is not unique");
    return best;
}

double dominant_state_protection(long n, const TrancheSpec& tranche,
                                 const MixtureStates& states) {
    const std::size_t i = dominant_state(states, tranche.alpha);
    const auto& s = states.states[i];
    return s.weight * protection_leg_asymptotic(n, tranche, s.f).value;
}

MixtureStates gaussian_copula_states(double p_default, double rho, int m) {
    if (!(p_default > 0.0 && p_default < 1.0))
        throw InvalidParameter("copula: p_default must be in (0,1)");
    if (!(rho > 0.0 && rho < 1.0))
        throw InvalidParameter("copula: rho must be in (0,1)");
    if (m < 1) throw InvalidParameter("copula: resolution must be >= 1");

    const double md = static_cast<double>(m);
    const long i_max = static_cast<long>(m) * m;
    const double z_p = std_normal_quantile(p_default);
    const double denom = std::sqrt(1.0 - rho * rho);

    MixtureStates out;
    out.states.reserve(static_cast<std::size_t>(2 * i_max + 1));
    for (long i = -i_max; i <= i_max; ++i) {
        const double x = static_cast<double>(i) / md;
        double w;
        if (i == -i_max) {
            w = std_normal_cdf(x + 0.5 / md);
        } else if (i == i_max) {
            w = 1.0 - std_normal_cdf(x - 0.5 / md);
        } else {
            w = std_normal_cdf(x + 0.5 / md) - std_normal_cdf(x - 0.5 / md);
        }
        const double f = std_normal_cdf((z_p - rho * x) / denom);
        out.states.push_back({w, f});
    }
    return out;
}

}  // namespace ldpcdo
