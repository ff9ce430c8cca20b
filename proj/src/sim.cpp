#include "ldpcdo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ldpcdo/errors.hpp"
#include "ldpcdo/parallel.hpp"

namespace ldpcdo {

namespace {

constexpr long kChunkPaths = 4096;

void finalize(Scenario& s) {
    s.sorted_in_window.clear();
    s.defaults_before_expiry = 0;
    for (double t : s.default_times) {
        if (t <= s.t_expiry) {
            s.sorted_in_window.push_back(t);
            if (t < s.t_expiry) ++s.defaults_before_expiry;
        }
    }
    std::sort(s.sorted_in_window.begin(), s.sorted_in_window.end());
}

/// Tranched loss (L - alpha)^+ ∧ (beta - alpha), normalized to [0,1].
double tranched(double loss, const TrancheSpec& tr) {
    return std::clamp((loss - tr.alpha) / (tr.beta - tr.alpha), 0.0, 1.0);
}

}  // namespace

Scenario Scenario::from_times(std::vector<double> times, double t_expiry) {
    Scenario s;
    s.pool_size = static_cast<long>(times.size());
    s.t_expiry = t_expiry;
    s.default_times = std::move(times);
    finalize(s);
    return s;
}

Scenario simulate_scenario(const DefaultCurve& curve, long n, double t_expiry,
                           RngStream& stream) {
    Scenario s;
    s.pool_size = n;
    s.t_expiry = t_expiry;
    s.default_times.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        s.default_times[static_cast<std::size_t>(i)] = curve.sample_default_time(stream);
    finalize(s);
    return s;
}

Scenario simulate_scenario(const DefaultCurve& curve, const TiltedMeasure& tilted,
                           long n, RngStream& stream) {
    Scenario s;
    s.pool_size = n;
    s.t_expiry = tilted.t_expiry;
    s.default_times.resize(static_cast<std::size_t>(n));
    const double f = tilted.f_t_minus;
    const double total = curve.total_mass();
    for (long i = 0; i < n; ++i) {
        // Two uniforms per name, always consumed, so the stream layout does
        // not depend on the outcomes.
        const double u1 = stream.next_uniform();
        const double u2 = stream.next_uniform();
        double t;
        if (u1 < tilted.alpha) {
            t = curve.quantile(u2 * f);  // conditional on default before expiry
        } else {
            const double q = f + u2 * (1.0 - f);
            t = q <= total ? curve.quantile(q) : kNeverTime;
        }
        s.default_times[static_cast<std::size_t>(i)] = t;
    }
    finalize(s);
    return s;
}

double protection_leg_value(const Scenario& scenario, const TrancheSpec& tranche) {
    const double n = static_cast<double>(scenario.pool_size);
    double value = 0.0;
    double prev = 0.0;  // tranched loss after the previous default
    long count = 0;
    for (double t : scenario.sorted_in_window) {
        if (t >= tranche.t_expiry) break;  // losses at expiry are not protected
        ++count;
        const double cur = tranched(static_cast<double>(count) / n, tranche);
        if (cur > prev) value += std::exp(-tranche.riskless_rate * t) * (cur - prev);
        prev = cur;
    }
    return value;
}

double premium_leg_value(const Scenario& scenario, const TrancheSpec& tranche) {
    const double n = static_cast<double>(scenario.pool_size);
    const auto& times = scenario.sorted_in_window;
    double value = 0.0;
    for (double t : tranche.payment_dates) {
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const double loss = static_cast<double>(it - times.begin()) / n;
        value += std::exp(-tranche.riskless_rate * t) * (1.0 - tranched(loss, tranche));
    }
    return value;
}

namespace {

struct LegPartial {
    double sum_p = 0.0, sum_pp = 0.0;
    double sum_q = 0.0, sum_qq = 0.0;
    double sum_pq = 0.0;
};

}  // namespace

McResult mc_price(const DefaultCurve& curve, const TrancheSpec& tranche, long n,
                  long n_paths, std::uint64_t seed) {
    tranche.validate();
    if (n < 1) throw InvalidParameter("pool size must be positive");
    if (n_paths < 2) throw InvalidParameter("need at least two paths");

    const long n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<LegPartial> partials(static_cast<std::size_t>(n_chunks));
    parallel_chunks(n_paths, kChunkPaths, [&](long chunk, long begin, long end) {
        LegPartial acc;
        for (long path = begin; path < end; ++path) {
            RngStream stream(seed, static_cast<std::uint64_t>(path));
            const Scenario s = simulate_scenario(curve, n, tranche.t_expiry, stream);
            const double p = protection_leg_value(s, tranche);
            const double q = premium_leg_value(s, tranche);
            acc.sum_p += p;
            acc.sum_pp += p * p;
            acc.sum_q += q;
            acc.sum_qq += q * q;
            acc.sum_pq += p * q;
        }
        partials[static_cast<std::size_t>(chunk)] = acc;
    });

    LegPartial tot;
    for (const auto& a : partials) {
        tot.sum_p += a.sum_p;
        tot.sum_pp += a.sum_pp;
        tot.sum_q += a.sum_q;
        tot.sum_qq += a.sum_qq;
        tot.sum_pq += a.sum_pq;
    }

    const double m = static_cast<double>(n_paths);
    const double mean_p = tot.sum_p / m;
    const double mean_q = tot.sum_q / m;
    const double var_p = std::max(0.0, (tot.sum_pp - m * mean_p * mean_p) / (m - 1.0));
    const double var_q = std::max(0.0, (tot.sum_qq - m * mean_q * mean_q) / (m - 1.0));
    const double cov = (tot.sum_pq - m * mean_p * mean_q) / (m - 1.0);

    McResult r;
    r.prot = {mean_p, std::sqrt(var_p / m), n_paths, seed, SimMode::Plain};
    r.prem = {mean_q, std::sqrt(var_q / m), n_paths, seed, SimMode::Plain};
    if (mean_q <= 0.0) throw UndefinedSpread("premium leg estimate is not positive");
    r.spread = mean_p / mean_q;
    const double var_ratio =
        (var_p / (mean_q * mean_q) + mean_p * mean_p * var_q / std::pow(mean_q, 4) -
         2.0 * mean_p * cov / std::pow(mean_q, 3)) /
        m;
    r.spread_std_error = std::sqrt(std::max(0.0, var_ratio));
    return r;
}

IsResult is_price(const DefaultCurve& curve, const TrancheSpec& tranche, long n,
                  long n_paths, std::uint64_t seed) {
    tranche.validate();
    if (n < 1) throw InvalidParameter("pool size must be positive");
    if (n_paths < 2) throw InvalidParameter("need at least two paths");

    const TiltedMeasure tilted = tilted_split(curve, tranche.alpha, tranche.t_expiry);
    const double k = kappa(tranche.alpha, tilted.f_t_minus);
    const double rate = rate_I(tranche.alpha, tilted.f_t_minus);
    const double n_alpha = static_cast<double>(n) * tranche.alpha;
    const long d_min = first_loss_count(n, tranche.alpha);

    const long n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<double> sum_w(static_cast<std::size_t>(n_chunks), 0.0);
    std::vector<double> sum_ww(static_cast<std::size_t>(n_chunks), 0.0);
    parallel_chunks(n_paths, kChunkPaths, [&](long chunk, long begin, long end) {
        double sw = 0.0, sww = 0.0;
        for (long path = begin; path < end; ++path) {
            RngStream stream(seed, static_cast<std::uint64_t>(path));
            const Scenario s = simulate_scenario(curve, tilted, n, stream);
            const long d = s.defaults_before_expiry;
            if (d < d_min) continue;
            const double gamma = static_cast<double>(d) - n_alpha;
            const double w = protection_leg_value(s, tranche) * std::exp(-k * gamma);
            sw += w;
            sww += w * w;
        }
        sum_w[static_cast<std::size_t>(chunk)] = sw;
        sum_ww[static_cast<std::size_t>(chunk)] = sww;
    });

    const double m = static_cast<double>(n_paths);
    const double tot_w = std::accumulate(sum_w.begin(), sum_w.end(), 0.0);
    const double tot_ww = std::accumulate(sum_ww.begin(), sum_ww.end(), 0.0);
    const double mean = tot_w / m;
    const double var = std::max(0.0, (tot_ww - m * mean * mean) / (m - 1.0));
    const double se = std::sqrt(var / m);

    IsResult r;
    r.weighted = {mean, se, n_paths, seed, SimMode::Tilted};
    r.rate = rate;
    r.kappa = k;
    const double damp = std::exp(-static_cast<double>(n) * rate);
    r.price = mean * damp;
    r.price_std_error = se * damp;
    r.log_price = mean > 0.0 ? std::log(mean) - static_cast<double>(n) * rate
                             : -std::numeric_limits<double>::infinity();
    r.relative_std_error = mean > 0.0 ? se / mean
                                      : std::numeric_limits<double>::infinity();
    return r;
}

TiltDiagnostics tilt_diagnostics(const DefaultCurve& curve, const TrancheSpec& tranche,
                                 long n, long n_paths, std::uint64_t seed,
                                 int n_buckets) {
    tranche.validate();
    if (n < 1) throw InvalidParameter("pool size must be positive");
    if (n_paths < 1) throw InvalidParameter("need at least one path");
    if (n_buckets < 1) throw InvalidParameter("need at least one bucket");

    const TiltedMeasure tilted = tilted_split(curve, tranche.alpha, tranche.t_expiry);
    const double n_alpha = static_cast<double>(n) * tranche.alpha;
    const long d_min = first_loss_count(n, tranche.alpha);

    struct BucketAcc {
        long hits = 0;
        double sum_prot = 0.0;
        double sum_ttx = 0.0;  // T minus the first tranche-loss default time
    };
    const long n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<std::vector<BucketAcc>> partials(
        static_cast<std::size_t>(n_chunks),
        std::vector<BucketAcc>(static_cast<std::size_t>(n_buckets)));
    std::vector<long> before_counts(static_cast<std::size_t>(n_chunks), 0);

    parallel_chunks(n_paths, kChunkPaths, [&](long chunk, long begin, long end) {
        auto& acc = partials[static_cast<std::size_t>(chunk)];
        long before = 0;
        for (long path = begin; path < end; ++path) {
            RngStream stream(seed, static_cast<std::uint64_t>(path));
            const Scenario s = simulate_scenario(curve, tilted, n, stream);
            before += s.defaults_before_expiry;
            const long d = s.defaults_before_expiry;
            const long b = d - d_min;
            if (b < 0 || b >= n_buckets) continue;
            auto& slot = acc[static_cast<std::size_t>(b)];
            ++slot.hits;
            slot.sum_prot += protection_leg_value(s, tranche);
            // The d_min-th smallest default time is when the tranche first
            // takes a loss.
            slot.sum_ttx +=
                tranche.t_expiry - s.sorted_in_window[static_cast<std::size_t>(d_min - 1)];
        }
        before_counts[static_cast<std::size_t>(chunk)] = before;
    });

    TiltDiagnostics diag;
    diag.n_paths = n_paths;
    long before_total = std::accumulate(before_counts.begin(), before_counts.end(), 0L);
    diag.frac_before_expiry = static_cast<double>(before_total) /
                              (static_cast<double>(n_paths) * static_cast<double>(n));

    const double clt_density =
        1.0 / std::sqrt(2.0 * std::acos(-1.0) * static_cast<double>(n) * tranche.alpha *
                        (1.0 - tranche.alpha));
    for (int b = 0; b < n_buckets; ++b) {
        BucketAcc tot;
        for (const auto& chunk_acc : partials) {
            const auto& a = chunk_acc[static_cast<std::size_t>(b)];
            tot.hits += a.hits;
            tot.sum_prot += a.sum_prot;
            tot.sum_ttx += a.sum_ttx;
        }
        if (tot.hits == 0) continue;
        TiltBucket bucket;
        bucket.defaults = d_min + b;
        bucket.excess = static_cast<double>(bucket.defaults) - n_alpha;
        bucket.hits = tot.hits;
        bucket.mean_prot = tot.sum_prot / static_cast<double>(tot.hits);
        bucket.mean_time_to_expiry = tot.sum_ttx / static_cast<double>(tot.hits);
        const double leading = std::exp(-tranche.riskless_rate * tranche.t_expiry) *
                               bucket.excess /
                               ((tranche.beta - tranche.alpha) * static_cast<double>(n));
        bucket.prot_ratio = leading > 0.0 ? bucket.mean_prot / leading : 0.0;
        bucket.pmf = static_cast<double>(tot.hits) / static_cast<double>(n_paths);
        bucket.pmf_ratio = bucket.pmf / clt_density;
        diag.buckets.push_back(bucket);
    }
    return diag;
}

}  // namespace ldpcdo
