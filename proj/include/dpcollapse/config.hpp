#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dpcollapse/io.hpp"
#include "dpcollapse/units.hpp"

namespace dpcollapse {

/// Parses "1e-15 m", "1amu", "50 nm" into SI. `key` names the offending entry in errors.
double parse_quantity(std::string_view text, Dimension expected, const std::string& key,
                      const PhysicalConstants& c = {});

struct RunConfig {
  ModelParams params;
  std::optional<double> mass;    ///< kg
  std::optional<double> radius;  ///< m
  FormFactorShape form_factor = FormFactorShape::gaussian_approx;
  std::uint64_t seed = 0;
  io::Json run = io::Json::object();
};

/// Schema: {"model", "preset", "R0", "m_r", "coarse_graining", "gamma", "r_c", "m0",
/// "mass", "radius", "form_factor", "seed", "run": {...}}. Unknown keys are rejected.
/// Defaults come from the preset (diosi for dp, csl_grw for csl).
RunConfig parse_config_json(const io::Json& j);
RunConfig parse_config(const std::filesystem::path& path);

/// Resolved parameters for a manifest.
io::Json params_to_json(const ModelParams& p);
io::Json config_to_json(const RunConfig& cfg);

}  // namespace dpcollapse
