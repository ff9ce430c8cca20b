#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ldpcdo/models.hpp"
#include "ldpcdo/pricer.hpp"
#include "ldpcdo/sim.hpp"

namespace ldpcdo {

/// Gaussian one-factor correlation block.
struct CopulaConfig {
    double p = 0.0;
    double rho = 0.0;
    int m = 0;
};

struct MixtureConfig {
    std::optional<MixtureStates> states;  // explicit {p, f} list
    std::optional<CopulaConfig> copula;   // or a copula to discretize
    MixtureStates resolve() const;
};

/// Parsed run configuration: curve, tranche, pool size, simulation settings,
/// optional systemic mixture.
struct RunConfig {
    DefaultCurve curve = DefaultCurve::flat_hazard(0.01);
    TrancheSpec tranche;
    long n = 0;
    long n_paths = 10000;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::Plain;
    std::optional<MixtureConfig> mixture;
};

/// Parses and schema-validates a JSON config document. Errors carry the
/// offending JSON path (for example "tranche.alpha").
RunConfig parse_run_config(const std::string& json_text);

/// Reads the file and parses it.
RunConfig load_run_config(const std::string& path);

/// Parses just a curve block, e.g. {"kind":"reduced_form","hazard":[...]}.
/// `json_path` prefixes error messages.
DefaultCurve parse_curve(const std::string& json_text, const std::string& json_path = "curve");

/// Serializes a curve back into its config-block form.
std::string curve_to_json(const DefaultCurve& curve);

}  // namespace ldpcdo
