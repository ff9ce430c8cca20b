#include "ldpcdo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/sim.hpp"

namespace ldpcdo {
namespace oracle {

namespace {

// Lanczos approximation, g = 7, 9 coefficients, evaluated in extended
// precision so that the large (z+0.5)ln(t) - t terms do not swallow digits
// for big arguments (log-pmf differences need absolute log accuracy).
long double log_gamma_impl(long double x) {
    static const long double g = 7.0L;
    static const long double coeffs[9] = {
        0.99999999999980993L,      676.5203681218851L,     -1259.1392167224028L,
        771.32342877765313L,       -176.61502916214059L,   12.507343278686905L,
        -0.13857109526572012L,     9.9843695780195716e-6L, 1.5056327351493116e-7L};
    const long double pi = 3.14159265358979323846264338327950288L;
    if (x < 0.5L) {
        // Reflection keeps accuracy near zero.
        return std::log(pi / std::sin(pi * x)) - log_gamma_impl(1.0L - x);
    }
    const long double z = x - 1.0L;
    long double a = coeffs[0];
    for (int i = 1; i < 9; ++i) a += coeffs[i] / (z + static_cast<long double>(i));
    const long double t = z + g + 0.5L;
    return 0.5L * std::log(2.0L * pi) + (z + 0.5L) * std::log(t) - t + std::log(a);
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw InvalidParameter("log_gamma requires x > 0");
    return static_cast<double>(log_gamma_impl(static_cast<long double>(x)));
}

double log_binomial_coefficient(long n, long k) {
    if (n < 0 || k < 0 || k > n)
        throw InvalidParameter("log_binomial_coefficient requires 0 <= k <= n");
    return static_cast<double>(log_gamma_impl(static_cast<long double>(n) + 1.0L) -
                               log_gamma_impl(static_cast<long double>(k) + 1.0L) -
                               log_gamma_impl(static_cast<long double>(n - k) + 1.0L));
}

double binomial_pmf(long n, double p, long k) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("binomial p must lie in [0,1]");
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    const long double lp =
        log_gamma_impl(static_cast<long double>(n) + 1.0L) -
        log_gamma_impl(static_cast<long double>(k) + 1.0L) -
        log_gamma_impl(static_cast<long double>(n - k) + 1.0L) +
        static_cast<long double>(k) * std::log(static_cast<long double>(p)) +
        static_cast<long double>(n - k) * std::log1p(-static_cast<long double>(p));
    return static_cast<double>(std::exp(lp));
}

double binomial_upper_tail(long n, double p, long k_min) {
    if (k_min <= 0) return 1.0;
    if (k_min > n) return 0.0;
    // Sum whichever tail has fewer terms, smallest terms first.
    const long upper_terms = n - k_min + 1;
    long double acc = 0.0L;
    if (upper_terms <= k_min) {
        for (long k = n; k >= k_min; --k) acc += binomial_pmf(n, p, k);
        return static_cast<double>(acc);
    }
    for (long k = 0; k < k_min; ++k) acc += binomial_pmf(n, p, k);
    return static_cast<double>(1.0L - acc);
}

double binomial_tail(long n, double p, double threshold) {
    return binomial_upper_tail(n, p, first_loss_count(n, threshold));
}

double local_clt_scan(long n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    const double n_alpha = static_cast<double>(n) * alpha;
    const double width = std::pow(static_cast<double>(n), 0.25);
    long k_lo = static_cast<long>(std::ceil(n_alpha));
    // Snap the lower edge when n*alpha is an integer up to float rounding.
    const double nearest = std::round(n_alpha);
    if (std::abs(n_alpha - nearest) <= 1e-9 * std::max(1.0, std::abs(n_alpha)))
        k_lo = static_cast<long>(nearest);
    const long k_hi = std::min(n, static_cast<long>(std::floor(n_alpha + width)));
    const double scale =
        std::sqrt(2.0 * std::acos(-1.0) * n_alpha * (1.0 - alpha));
    double worst = 0.0;
    for (long k = k_lo; k <= k_hi; ++k)
        worst = std::max(worst, std::abs(binomial_pmf(n, alpha, k) * scale - 1.0));
    return worst;
}

namespace {

void validate_law(const DiscreteLaw& law) {
    if (law.times.size() != law.weights.size() || law.times.empty())
        throw InvalidParameter("discrete law needs matching, nonempty atom arrays");
    double total = 0.0;
    for (std::size_t i = 0; i < law.times.size(); ++i) {
        if (!(law.weights[i] > 0.0))
            throw InvalidParameter("discrete law weights must be positive");
        if (!(law.times[i] >= 0.0))
            throw InvalidParameter("discrete law times must be nonnegative");
        total += law.weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidParameter("discrete law weights must sum to one");
}

double relative_entropy(const std::vector<double>& wp, const std::vector<double>& w) {
    double h = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (wp[i] > 0.0) h += wp[i] * std::log(wp[i] / w[i]);
    }
    return h;
}

}  // namespace

RateMinResult rate_min_bruteforce(const DiscreteLaw& law, double alpha, double t_expiry,
                                  int grid) {
    validate_law(law);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0,1)");
    if (grid < 2) throw InvalidParameter("grid must be at least 2");

    std::vector<std::size_t> before, after;
    double f = 0.0;
    for (std::size_t i = 0; i < law.times.size(); ++i) {
        if (law.times[i] < t_expiry) {
            before.push_back(i);
            f += law.weights[i];
        } else {
            after.push_back(i);
        }
    }
    RateMinResult result;
    if (f >= alpha) {
        // Constraint already satisfied by the base law.
        result.min_entropy = 0.0;
        result.argmin_level = f;
        result.argmin_weights = law.weights;
        return result;
    }
    if (before.empty())
        throw AssumptionViolated("no mass before expiry; constraint is infeasible");
    if (before.size() > 2)
        throw InvalidParameter("brute-force minimizer supports at most two atoms before expiry");

    result.min_entropy = std::numeric_limits<double>::infinity();
    std::vector<double> wp(law.weights.size(), 0.0);
    const double level_hi = alpha + 0.5 * (1.0 - alpha);
    for (int j = 0; j <= grid; ++j) {
        const double c =
            alpha + (level_hi - alpha) * static_cast<double>(j) / static_cast<double>(grid);
        const double after_scale = (1.0 - c) / (1.0 - f);
        for (std::size_t idx : after) wp[idx] = law.weights[idx] * after_scale;
        const int inner = before.size() == 2 ? grid : 0;
        for (int i = 0; i <= inner; ++i) {
            if (before.size() == 1) {
                wp[before[0]] = c;
            } else {
                const double theta = static_cast<double>(i) / static_cast<double>(grid);
                wp[before[0]] = theta * c;
                wp[before[1]] = (1.0 - theta) * c;
            }
            const double h = relative_entropy(wp, law.weights);
            if (h < result.min_entropy) {
                result.min_entropy = h;
                result.argmin_level = c;
                result.argmin_weights = wp;
            }
        }
    }
    return result;
}

ExactPrice enumerate_exact_price(const DiscreteLaw& law, const TrancheSpec& tranche,
                                 long n, long max_outcomes) {
    validate_law(law);
    tranche.validate();
    if (n < 1) throw InvalidParameter("pool size must be positive");
    const std::size_t k = law.times.size();

    // Composition count C(n+k-1, k-1); refuse up front if it blows past the cap.
    const double log_count = log_binomial_coefficient(n + static_cast<long>(k) - 1,
                                                      static_cast<long>(k) - 1);
    if (log_count > std::log(static_cast<double>(max_outcomes)) + 1e-9)
        throw CombinatorialBlowup("too many pool outcomes to enumerate");

    std::vector<double> log_w(k);
    for (std::size_t i = 0; i < k; ++i) log_w[i] = std::log(law.weights[i]);
    const double log_n_fact = log_gamma(static_cast<double>(n) + 1.0);

    ExactPrice out;
    std::vector<long> counts(k, 0);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n));

    // Lexicographic walk over compositions of n into k nonnegative parts.
    const auto visit = [&](auto&& self, std::size_t atom, long remaining) -> void {
        if (atom + 1 == k) {
            counts[atom] = remaining;
            double lp = log_n_fact;
            times.clear();
            for (std::size_t i = 0; i < k; ++i) {
                lp += static_cast<double>(counts[i]) * log_w[i] -
                      log_gamma(static_cast<double>(counts[i]) + 1.0);
                times.insert(times.end(), static_cast<std::size_t>(counts[i]),
                             law.times[i]);
            }
            const double prob = std::exp(lp);
            const Scenario s = Scenario::from_times(times, tranche.t_expiry);
            out.protection += prob * protection_leg_value(s, tranche);
            out.premium += prob * premium_leg_value(s, tranche);
            ++out.n_outcomes;
            return;
        }
        for (long c = 0; c <= remaining; ++c) {
            counts[atom] = c;
            self(self, atom + 1, remaining - c);
        }
    };
    visit(visit, 0, n);

    if (out.premium <= 0.0) throw UndefinedSpread("premium leg is not positive");
    out.spread = out.protection / out.premium;
    return out;
}

DiscreteLaw discrete_law_from_curve(const DefaultCurve& curve) {
    const TabulatedParams* tab = curve.as_tabulated();
    if (tab == nullptr || tab->interp != TabulatedInterp::Step)
        throw InvalidParameter("atom extraction needs a step-interpolated tabulated curve");
    DiscreteLaw law;
    double prev = 0.0;
    for (std::size_t i = 0; i < tab->times.size(); ++i) {
        const double w = tab->cdf[i] - prev;
        prev = tab->cdf[i];
        if (w > 0.0) {
            law.times.push_back(tab->times[i]);
            law.weights.push_back(w);
        }
    }
    const double tail = curve.mass_at_infinity();
    if (tail > 1e-15) {
        law.times.push_back(kNeverTime);
        law.weights.push_back(tail);
    }
    return law;
}

}  // namespace oracle
}  // namespace ldpcdo
