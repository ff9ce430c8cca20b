// Command-line surface: pricing, pool-size sweeps, simulation, calibration,
// and the self-verification suite. Exit codes: 0 ok, 2 config error,
// 3 assumption violated, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldpcdo/config.hpp"
#include "ldpcdo/errors.hpp"
#include "ldpcdo/ldp.hpp"
#include "ldpcdo/models.hpp"
#include "ldpcdo/oracle.hpp"
#include "ldpcdo/pricer.hpp"
#include "ldpcdo/rng.hpp"
#include "ldpcdo/sim.hpp"
#include "ldpcdo/verify.hpp"

namespace {

using namespace ldpcdo;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitVerification = 4;

std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Overrides {
    std::optional<long> n;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
};

RunConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg = load_run_config(config_path);
    if (ov.n) cfg.n = *ov.n;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.paths) cfg.n_paths = *ov.paths;
    if (cfg.n < 1) throw ConfigError("pool.n: pool size must be positive");
    if (cfg.n_paths < 1) throw ConfigError("simulation.n_paths: must be positive");
    return cfg;
}

double curve_f_t_minus(const RunConfig& cfg) {
    return cfg.curve.cdf_left_limit(cfg.tranche.t_expiry);
}

void check_investment_grade(const RunConfig& cfg) {
    const AssumptionReport rep =
        validate_assumptions(cfg.curve, cfg.tranche.alpha, cfg.tranche.t_expiry, cfg.n);
    if (!rep.ig_ok) {
        throw AssumptionViolated(
            "investment-grade assumption alpha > F(T-) fails: alpha = " +
            full(cfg.tranche.alpha) + ", F(T-) = " + full(rep.f_t_minus));
    }
    if (!rep.density_ok)
        std::cerr << "warning: default curve is flat immediately left of expiry; "
                     "asymptotics may be unreliable\n";
}

int cmd_price(const std::string& config_path, const Overrides& ov) {
    const RunConfig cfg = load_with_overrides(config_path, ov);
    check_investment_grade(cfg);
    const double f = curve_f_t_minus(cfg);
    const double ln10 = std::log(10.0);

    std::cout << "pool size:        " << cfg.n << "\n";
    std::cout << "attachment:       " << full(cfg.tranche.alpha) << "\n";
    std::cout << "detachment:       " << full(cfg.tranche.beta) << "\n";
    std::cout << "F(T-):            " << full(f) << "\n";

    if (cfg.mixture) {
        const MixtureStates states = cfg.mixture->resolve();
        states.validate_investment_grade(cfg.tranche.alpha);
        const double total = mixture_protection_asymptotic(cfg.n, cfg.tranche, states);
        const std::size_t dom = dominant_state(states, cfg.tranche.alpha);
        std::cout << "mixture states:   " << states.states.size() << "\n";
        for (std::size_t i = 0; i < states.states.size(); ++i) {
            const auto& s = states.states[i];
            const double contrib =
                s.weight * protection_leg_asymptotic(cfg.n, cfg.tranche, s.f).value;
            std::cout << "  state " << i << ": weight " << full(s.weight) << ", f "
                      << full(s.f) << ", contribution " << full(contrib)
                      << (i == dom ? "  (dominant)" : "") << "\n";
        }
        std::cout << "protection value: " << full(total) << "\n";
        std::cout << "log10 value:      "
                  << full(total > 0.0 ? std::log10(total)
                                      : -std::numeric_limits<double>::infinity())
                  << "\n";
        return kExitOk;
    }

    const AsymptoticPrice prot = protection_leg_asymptotic(cfg.n, cfg.tranche, f);
    const AsymptoticPrice spread = spread_asymptotic(cfg.n, cfg.tranche, f);
    std::cout << "granularity:      " << full(prot.granularity) << "\n";
    std::cout << "exponent (nats):  " << full(prot.exponent) << "\n";
    std::cout << "protection value: " << full(prot.value) << "\n";
    std::cout << "log10 protection: " << full(prot.log_value / ln10) << "\n";
    std::cout << "par spread:       " << full(spread.value) << "\n";
    std::cout << "log10 spread:     " << full(spread.log_value / ln10) << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& ov, long n_from,
              long n_to, long n_step, const std::string& out_path) {
    RunConfig cfg = load_with_overrides(config_path, ov);
    if (n_from < 1 || n_to < n_from || n_step < 1)
        throw ConfigError("sweep range: need 1 <= n-from <= n-to and n-step >= 1");
    cfg.n = n_from;
    check_investment_grade(cfg);
    const double f = curve_f_t_minus(cfg);
    const double ln10 = std::log(10.0);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot open output file: " + out_path);
        out = &file;
    }
    *out << "N,alpha,beta,f_t_minus,granularity,exponent_nats,value,log10_value\n";
    for (long n = n_from; n <= n_to; n += n_step) {
        const AsymptoticPrice sp = spread_asymptotic(n, cfg.tranche, f);
        *out << n << ',' << full(cfg.tranche.alpha) << ',' << full(cfg.tranche.beta)
             << ',' << full(f) << ',' << full(sp.granularity) << ','
             << full(sp.exponent) << ',' << full(sp.value) << ','
             << full(sp.log_value / ln10) << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const Overrides& ov,
                 const std::string& out_path) {
    const RunConfig cfg = load_with_overrides(config_path, ov);
    if (cfg.mode == SimMode::Tilted) check_investment_grade(cfg);

    std::ofstream file;
    std::ostream* csv = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot open output file: " + out_path);
        csv = &file;
    }

    const TrancheSpec& tr = cfg.tranche;
    *csv << "path,defaults_before_T,prot,prem,weight\n";
    double sum_p = 0, sum_pp = 0, sum_q = 0, sum_qq = 0, sum_w = 0, sum_ww = 0;
    std::optional<TiltedMeasure> tilted;
    double k = 0.0, rate = 0.0;
    if (cfg.mode == SimMode::Tilted) {
        tilted = tilted_split(cfg.curve, tr.alpha, tr.t_expiry);
        k = kappa(tr.alpha, tilted->f_t_minus);
        rate = rate_I(tr.alpha, tilted->f_t_minus);
    }
    const long d_min = first_loss_count(cfg.n, tr.alpha);
    const double n_alpha = static_cast<double>(cfg.n) * tr.alpha;

    for (long path = 0; path < cfg.n_paths; ++path) {
        RngStream stream(cfg.seed, static_cast<std::uint64_t>(path));
        const Scenario s =
            tilted ? simulate_scenario(cfg.curve, *tilted, cfg.n, stream)
                   : simulate_scenario(cfg.curve, cfg.n, tr.t_expiry, stream);
        const double p = protection_leg_value(s, tr);
        const double q = premium_leg_value(s, tr);
        double w = 1.0;
        if (tilted) {
            w = s.defaults_before_expiry >= d_min
                    ? std::exp(-k * (static_cast<double>(s.defaults_before_expiry) -
                                     n_alpha))
                    : 0.0;
        }
        *csv << path << ',' << s.defaults_before_expiry << ',' << full(p) << ','
             << full(q) << ',' << full(w) << "\n";
        sum_p += p;
        sum_pp += p * p;
        sum_q += q;
        sum_qq += q * q;
        const double pw = p * w;
        sum_w += pw;
        sum_ww += pw * pw;
    }

    const double m = static_cast<double>(cfg.n_paths);
    const auto se = [m](double sum, double sum_sq) {
        const double mean = sum / m;
        return std::sqrt(std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) / m);
    };
    nlohmann::json summary;
    summary["n_paths"] = cfg.n_paths;
    summary["seed"] = cfg.seed;
    summary["mode"] = tilted ? "tilted" : "plain";
    if (tilted) {
        summary["kappa"] = k;
        summary["rate_nats"] = rate;
        const double mean_w = sum_w / m;
        summary["weighted_prot"] = {{"mean", mean_w}, {"std_error", se(sum_w, sum_ww)}};
        summary["log_price"] =
            mean_w > 0.0 ? std::log(mean_w) - static_cast<double>(cfg.n) * rate
                         : -std::numeric_limits<double>::infinity();
        const TiltDiagnostics diag =
            tilt_diagnostics(cfg.curve, tr, cfg.n, cfg.n_paths, cfg.seed, 8);
        summary["frac_before_expiry"] = diag.frac_before_expiry;
        nlohmann::json buckets = nlohmann::json::object();
        for (const auto& b : diag.buckets) {
            buckets[full(b.excess)] = {{"defaults", b.defaults},
                                       {"hits", b.hits},
                                       {"mean_prot", b.mean_prot},
                                       {"prot_ratio", b.prot_ratio},
                                       {"mean_time_to_expiry", b.mean_time_to_expiry},
                                       {"pmf", b.pmf},
                                       {"pmf_ratio", b.pmf_ratio}};
        }
        summary["buckets"] = buckets;
    } else {
        summary["prot"] = {{"mean", sum_p / m}, {"std_error", se(sum_p, sum_pp)}};
        summary["prem"] = {{"mean", sum_q / m}, {"std_error", se(sum_q, sum_qq)}};
        if (sum_q > 0.0) summary["spread"] = sum_p / sum_q;
    }
    std::ostream& dst = out_path.empty() ? std::cerr : std::cout;
    dst << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& level_name) {
    VerifyLevel level;
    if (level_name == "quick")
        level = VerifyLevel::Quick;
    else if (level_name == "full")
        level = VerifyLevel::Full;
    else
        throw ConfigError("--level: expected quick or full");

    const VerifyReport report = run_verification(level, &std::cout);
    if (level == VerifyLevel::Full) {
        std::cout << "\nlocal limit scan table (max pointwise pmf error over the "
                     "window):\n";
        std::cout << "  n        alpha=0.1     alpha=0.5\n";
        for (long n : {100L, 1000L, 10000L}) {
            std::printf("  %-8ld %-13.6g %-13.6g\n", n, oracle::local_clt_scan(n, 0.1),
                        oracle::local_clt_scan(n, 0.5));
        }
    }
    std::cout << (report.all_passed ? "verification passed" : "verification FAILED")
              << "\n";
    return report.all_passed ? kExitOk : kExitVerification;
}

int cmd_calibrate(double spread, const std::string& dates_spec, double rate,
                  double t_expiry) {
    std::vector<double> dates;
    if (dates_spec == "quarterly") {
        dates = TrancheSpec::quarterly_dates(t_expiry);
    } else {
        std::string token;
        std::istringstream in(dates_spec);
        while (std::getline(in, token, ',')) {
            try {
                dates.push_back(std::stod(token));
            } catch (const std::exception&) {
                throw ConfigError("--dates: expected comma-separated times or "
                                  "\"quarterly\"");
            }
        }
        if (dates.empty()) throw ConfigError("--dates: no payment dates given");
    }
    const DefaultCurve curve = calibrate_flat_hazard(spread, dates, rate, t_expiry);
    const double lambda = curve.as_reduced_form()->segments.front().lambda;
    std::cout << "lambda:  " << full(lambda) << "\n";
    std::cout << "F(T-):   " << full(curve.cdf_left_limit(t_expiry)) << "\n";
    std::cout << "curve:   " << curve_to_json(curve) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Large-pool tranche pricing: closed-form asymptotics, tilted "
                 "Monte Carlo, and self-verification"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    long ov_n = 0, ov_paths = 0;
    std::uint64_t ov_seed = 0;

    const auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* c = cmd->add_option("--config", config_path, "JSON run configuration");
        if (need_config) c->required();
        cmd->add_option("--n", ov_n, "override pool size")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", ov_seed, "override RNG seed");
        cmd->add_option("--paths", ov_paths, "override simulation path count")
            ->check(CLI::PositiveNumber);
        cmd->callback([&, cmd] {
            if (cmd->count("--n")) ov.n = ov_n;
            if (cmd->count("--seed")) ov.seed = ov_seed;
            if (cmd->count("--paths")) ov.paths = ov_paths;
        });
    };

    auto* price = app.add_subcommand("price", "closed-form asymptotic price report");
    add_common(price, true);

    auto* sweep = app.add_subcommand("sweep", "CSV of prices over a pool-size range");
    add_common(sweep, true);
    long n_from = 50, n_to = 500, n_step = 1;
    std::string sweep_out;
    sweep->add_option("--n-from", n_from, "first pool size")->required();
    sweep->add_option("--n-to", n_to, "last pool size")->required();
    sweep->add_option("--n-step", n_step, "pool-size increment");
    sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "per-path Monte Carlo CSV + summary");
    add_common(simulate, true);
    std::string sim_out;
    simulate->add_option("--out", sim_out, "per-path CSV path (default stdout)");

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    std::string level = "quick";
    verify->add_option("--level", level, "quick or full");

    auto* calibrate =
        app.add_subcommand("calibrate", "flat hazard from a quoted single-name spread");
    double cal_spread = 0.0, cal_rate = 0.0, cal_t = 5.0;
    std::string cal_dates = "quarterly";
    calibrate->add_option("--spread", cal_spread, "quoted par spread")->required();
    calibrate->add_option("--rate", cal_rate, "riskless rate");
    calibrate->add_option("--t-expiry", cal_t, "contract expiry");
    calibrate->add_option("--dates", cal_dates,
                          "comma-separated payment dates or \"quarterly\"");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (price->parsed()) return cmd_price(config_path, ov);
        if (sweep->parsed())
            return cmd_sweep(config_path, ov, n_from, n_to, n_step, sweep_out);
        if (simulate->parsed()) return cmd_simulate(config_path, ov, sim_out);
        if (verify->parsed()) return cmd_verify(level);
        if (calibrate->parsed())
            return cmd_calibrate(cal_spread, cal_dates, cal_rate, cal_t);
    } catch (const AssumptionViolated& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const DegenerateCurve& e) {
        std::cerr << "degenerate curve: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
