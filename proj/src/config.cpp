#include "ldpcdo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ldpcdo/errors.hpp"

namespace ldpcdo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

long require_count(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<long>();
}

DefaultCurve parse_curve_json(const json& block, const std::string& path) {
    if (!block.is_object()) fail(path, "expected an object");
    const json& kind_v = require(block, "kind", path);
    if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
    const std::string kind = kind_v.get<std::string>();
    if (kind == "reduced_form") {
        const json& hazard = require(block, "hazard", path);
        if (!hazard.is_array() || hazard.empty())
            fail(path + ".hazard", "expected a nonempty array of segments");
        std::vector<HazardSegment> segments;
        for (std::size_t i = 0; i < hazard.size(); ++i) {
            const std::string seg_path = path + ".hazard[" + std::to_string(i) + "]";
            const json& seg = hazard[i];
            double until;
            const json& until_v = require(seg, "until", seg_path);
            if (until_v.is_string() && until_v.get<std::string>() == "inf")
                until = kNeverTime;
            else if (until_v.is_number())
                until = until_v.get<double>();
            else
                fail(seg_path + ".until", "expected a number or \"inf\"");
            segments.push_back({until, require_number(seg, "lambda", seg_path)});
        }
        try {
            return DefaultCurve::reduced_form(std::move(segments));
        } catch (const Error& e) {
            fail(path + ".hazard", e.what());
        }
    }
    if (kind == "merton") {
        try {
            return DefaultCurve::merton(require_number(block, "sigma", path),
                                        require_number(block, "theta", path),
                                        require_number(block, "barrier", path));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    if (kind == "tabulated") {
        const json& times_v = require(block, "times", path);
        const json& cdf_v = require(block, "cdf", path);
        if (!times_v.is_array()) fail(path + ".times", "expected an array");
        if (!cdf_v.is_array()) fail(path + ".cdf", "expected an array");
        std::vector<double> times, cdf;
        for (const auto& t : times_v) {
            if (!t.is_number()) fail(path + ".times", "expected numbers");
            times.push_back(t.get<double>());
        }
        for (const auto& c : cdf_v) {
            if (!c.is_number()) fail(path + ".cdf", "expected numbers");
            cdf.push_back(c.get<double>());
        }
        TabulatedInterp interp = TabulatedInterp::Step;
        if (block.contains("interp")) {
            const json& iv = block.at("interp");
            if (!iv.is_string()) fail(path + ".interp", "expected \"step\" or \"linear\"");
            const std::string s = iv.get<std::string>();
            if (s == "step")
                interp = TabulatedInterp::Step;
            else if (s == "linear")
                interp = TabulatedInterp::Linear;
            else
                fail(path + ".interp", "expected \"step\" or \"linear\"");
        }
        try {
            return DefaultCurve::tabulated(std::move(times), std::move(cdf), interp);
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    fail(path + ".kind", "unknown curve kind \"" + kind + "\"");
}

TrancheSpec parse_tranche_json(const json& block, const std::string& path) {
    if (!block.is_object()) fail(path, "expected an object");
    TrancheSpec tr;
    tr.alpha = require_number(block, "alpha", path);
    tr.beta = require_number(block, "beta", path);
    tr.t_expiry = require_number(block, "t_expiry", path);
    tr.riskless_rate = require_number(block, "riskless_rate", path);
    const json& dates = require(block, "payment_dates", path);
    if (dates.is_string()) {
        if (dates.get<std::string>() != "quarterly")
            fail(path + ".payment_dates", "expected an array of times or \"quarterly\"");
        tr.payment_dates = TrancheSpec::quarterly_dates(tr.t_expiry);
    } else if (dates.is_array()) {
        for (const auto& d : dates) {
            if (!d.is_number()) fail(path + ".payment_dates", "expected numbers");
            tr.payment_dates.push_back(d.get<double>());
        }
    } else {
        fail(path + ".payment_dates", "expected an array of times or \"quarterly\"");
    }
    try {
        tr.validate();
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return tr;
}

MixtureConfig parse_mixture_json(const json& block, const std::string& path) {
    if (!block.is_object()) fail(path, "expected an object");
    MixtureConfig mix;
    const bool has_states = block.contains("states");
    const bool has_copula = block.contains("copula");
    if (has_states == has_copula)
        fail(path, "expected exactly one of \"states\" or \"copula\"");
    if (has_states) {
        const json& states = block.at("states");
        if (!states.is_array() || states.empty())
            fail(path + ".states", "expected a nonempty array");
        MixtureStates ms;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const std::string sp = path + ".states[" + std::to_string(i) + "]";
            ms.states.push_back({require_number(states[i], "p", sp),
                                 require_number(states[i], "f", sp)});
        }
        try {
            ms.validate();
        } catch (const Error& e) {
            fail(path + ".states", e.what());
        }
        mix.states = std::move(ms);
    } else {
        const json& cop = block.at("copula");
        CopulaConfig c;
        c.p = require_number(cop, "p", path + ".copula");
        c.rho = require_number(cop, "rho", path + ".copula");
        c.m = static_cast<int>(require_count(cop, "m", path + ".copula"));
        mix.copula = c;
    }
    return mix;
}

}  // namespace

MixtureStates MixtureConfig::resolve() const {
    if (states) return *states;
    if (copula) return gaussian_copula_states(copula->p, copula->rho, copula->m);
    throw ConfigError("mixture: empty mixture block");
}

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("(root): not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("(root): expected a JSON object");

    RunConfig cfg;
    cfg.curve = parse_curve_json(require(doc, "curve", "(root)"), "curve");
    cfg.tranche = parse_tranche_json(require(doc, "tranche", "(root)"), "tranche");
    cfg.n = require_count(require(doc, "pool", "(root)"), "n", "pool");
    if (cfg.n < 1) fail("pool.n", "pool size must be positive");

    if (doc.contains("simulation")) {
        const json& sim = doc.at("simulation");
        if (!sim.is_object()) fail("simulation", "expected an object");
        if (sim.contains("n_paths")) {
            cfg.n_paths = require_count(sim, "n_paths", "simulation");
            if (cfg.n_paths < 1) fail("simulation.n_paths", "must be positive");
        }
        if (sim.contains("seed")) {
            const json& s = sim.at("seed");
            if (!s.is_number_integer()) fail("simulation.seed", "expected an integer");
            cfg.seed = s.get<std::uint64_t>();
        }
        if (sim.contains("mode")) {
            const json& m = sim.at("mode");
            if (!m.is_string()) fail("simulation.mode", "expected \"plain\" or \"tilted\"");
            const std::string mode = m.get<std::string>();
            if (mode == "plain")
                cfg.mode = SimMode::Plain;
            else if (mode == "tilted")
                cfg.mode = SimMode::Tilted;
            else
                fail("simulation.mode", "expected \"plain\" or \"tilted\"");
        }
    }
    if (doc.contains("mixture"))
        cfg.mixture = parse_mixture_json(doc.at("mixture"), "mixture");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

DefaultCurve parse_curve(const std::string& json_text, const std::string& json_path) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(json_path + ": not valid JSON: " + e.what());
    }
    return parse_curve_json(doc, json_path);
}

std::string curve_to_json(const DefaultCurve& curve) {
    json out;
    if (const auto* rf = curve.as_reduced_form()) {
        out["kind"] = "reduced_form";
        json hazard = json::array();
        for (const auto& seg : rf->segments) {
            json s;
            if (std::isinf(seg.until))
                s["until"] = "inf";
            else
                s["until"] = seg.until;
            s["lambda"] = seg.lambda;
            hazard.push_back(s);
        }
        out["hazard"] = hazard;
    } else if (const auto* m = curve.as_merton()) {
        out["kind"] = "merton";
        out["sigma"] = m->sigma;
        out["theta"] = m->theta;
        out["barrier"] = m->barrier;
    } else if (const auto* t = curve.as_tabulated()) {
        out["kind"] = "tabulated";
        out["times"] = t->times;
        out["cdf"] = t->cdf;
        out["interp"] = t->interp == TabulatedInterp::Step ? "step" : "linear";
    }
    return out.dump();
}

}  // namespace ldpcdo
