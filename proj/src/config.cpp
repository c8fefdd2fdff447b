#include "dpcollapse/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

namespace {

constexpr std::array<std::string_view, 13> kTopKeys{"model", "preset", "R0",     "m_r",         "coarse_graining",
                                                     "gamma", "r_c",    "m0",     "mass",        "radius",
                                                     "form_factor", "seed", "run"};
constexpr std::array<std::string_view, 16> kRunKeys{"command", "points",   "x_min",     "x_max",
                                                    "spacing", "n_sites",  "grid_spacing", "t_final",
                                                    "dt",      "n_traj",   "weight",    "separation",
                                                    "particles", "k",      "scaled_mass", "policy"};

template <std::size_t N>
bool known(const std::array<std::string_view, N>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

std::string string_at(const io::Json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw ConfigError(key + ": expected a string");
  return j.at(key).get<std::string>();
}

}  // namespace

double parse_quantity(std::string_view text, Dimension expected, const std::string& key, const PhysicalConstants& c) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc()) throw UnitError(key + ": cannot parse a number from '" + std::string(text) + "'");
  std::string_view unit(res.ptr, text.data() + text.size() - res.ptr);
  while (!unit.empty() && unit.front() == ' ') unit.remove_prefix(1);
  while (!unit.empty() && unit.back() == ' ') unit.remove_suffix(1);
  if (unit.empty()) throw UnitError(key + ": missing unit in '" + std::string(text) + "'");
  Unit u;
  try {
    u = parse_unit(unit);
  } catch (const UnitError& e) {
    throw UnitError(key + ": " + e.what());
  }
  if (dimension_of(u) != expected)
    throw UnitError(key + ": unit '" + std::string(unit) + "' has the wrong dimension");
  if (!std::isfinite(value)) throw ParameterError(key + ": value must be finite");
  return value * si_factor(u, c);
}

RunConfig parse_config_json(const io::Json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known(kTopKeys, k)) throw ConfigError(k + ": unknown key");

  RunConfig cfg;
  std::optional<ModelKind> kind;
  if (j.contains("model")) kind = parse_model_kind(string_at(j, "model"));
  if (j.contains("preset")) {
    cfg.params = preset(string_at(j, "preset"));
  } else {
    cfg.params = preset(kind.value_or(ModelKind::dp) == ModelKind::dp ? PresetName::diosi : PresetName::csl_grw);
  }
  if (kind) cfg.params.kind = *kind;

  const auto& c = cfg.params.constants;
  auto quantity = [&](const char* key, Dimension dim, auto setter) {
    if (!j.contains(key)) return;
    setter(parse_quantity(string_at(j, key), dim, key, c));
  };
  quantity("R0", Dimension::length, [&](double v) { cfg.params.dp.R0 = v; });
  quantity("m_r", Dimension::mass, [&](double v) { cfg.params.dp.m_r = v; });
  quantity("gamma", Dimension::diffusion_strength, [&](double v) { cfg.params.csl.gamma = v; });
  quantity("r_c", Dimension::length, [&](double v) { cfg.params.csl.r_c = v; });
  quantity("m0", Dimension::mass, [&](double v) { cfg.params.csl.m0 = v; });
  quantity("mass", Dimension::mass, [&](double v) { cfg.mass = v; });
  quantity("radius", Dimension::length, [&](double v) { cfg.radius = v; });
  if (j.contains("coarse_graining")) {
    const auto s = string_at(j, "coarse_graining");
    if (s == "gaussian") cfg.params.dp.coarse_graining = CoarseGraining::gaussian;
    else if (s == "sphere") cfg.params.dp.coarse_graining = CoarseGraining::sphere;
    else throw ConfigError("coarse_graining: expected gaussian or sphere");
  }
  if (j.contains("form_factor")) {
    const auto s = string_at(j, "form_factor");
    if (s == "gaussian_approx") cfg.form_factor = FormFactorShape::gaussian_approx;
    else if (s == "sphere_exact") cfg.form_factor = FormFactorShape::sphere_exact;
    else throw ConfigError("form_factor: expected gaussian_approx or sphere_exact");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("run")) {
    if (!j["run"].is_object()) throw ConfigError("run: expected an object");
    for (const auto& [k, v] : j["run"].items())
      if (!known(kRunKeys, k)) throw ConfigError("run." + k + ": unknown key");
    cfg.run = j["run"];
  }

  auto named = [](const char* key, auto&& check) {
    try {
      check();
    } catch (const ParameterError& e) {
      throw ParameterError(std::string(key) + ": " + e.what());
    }
  };
  named("R0", [&] { if (!(cfg.params.dp.R0 > 0)) throw ParameterError("must be > 0"); });
  named("m_r", [&] { if (!(cfg.params.dp.m_r >= 0)) throw ParameterError("must be >= 0"); });
  named("gamma", [&] { if (!(cfg.params.csl.gamma > 0)) throw ParameterError("must be > 0"); });
  named("r_c", [&] { if (!(cfg.params.csl.r_c > 0)) throw ParameterError("must be > 0"); });
  named("m0", [&] { if (!(cfg.params.csl.m0 > 0)) throw ParameterError("must be > 0"); });
  named("mass", [&] { if (cfg.mass && !(*cfg.mass >= 0)) throw ParameterError("must be >= 0"); });
  named("radius", [&] { if (cfg.radius && !(*cfg.radius >= 0)) throw ParameterError("must be >= 0"); });
  cfg.params.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  io::Json j;
  try {
    j = io::Json::parse(io::read_file(path));
  } catch (const io::Json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config_json(j);
}

io::Json params_to_json(const ModelParams& p) {
  return {{"model", std::string(to_string(p.kind))},
          {"preset", p.preset_name},
          {"provenance", p.provenance},
          {"constants", {{"G", p.constants.G}, {"hbar", p.constants.hbar}, {"kB", p.constants.kB}, {"amu", p.constants.amu}}},
          {"dp", {{"R0_m", p.dp.R0}, {"m_r_kg", p.dp.m_r},
                  {"coarse_graining", p.dp.coarse_graining == CoarseGraining::gaussian ? "gaussian" : "sphere"}}},
          {"csl", {{"gamma_m3_per_s", p.csl.gamma}, {"r_c_m", p.csl.r_c}, {"m0_kg", p.csl.m0}}}};
}

io::Json config_to_json(const RunConfig& cfg) {
  io::Json j = {{"params", params_to_json(cfg.params)}, {"seed", cfg.seed}, {"run", cfg.run}};
  if (cfg.mass) j["mass_kg"] = *cfg.mass;
  if (cfg.radius) j["radius_m"] = *cfg.radius;
  j["form_factor"] = cfg.form_factor == FormFactorShape::gaussian_approx ? "gaussian_approx" : "sphere_exact";
  if (cfg.mass && *cfg.mass > 0) {
    try {
      const auto s = dimensionless_scaling(cfg.params, ParticleSpec{*cfg.mass});
      j["scaled_units"] = {{"length_m", s.length_scale}, {"time_s", s.time_scale}, {"energy_J", s.energy_scale},
                           {"mass_kg", s.mass_scale}, {"momentum_kg_m_per_s", s.momentum_scale}};
    } catch (const ParameterError&) {
      // no closed-form rate (sphere coarse-graining): no scale set to report
    }
  }
  return j;
}

}  // namespace dpcollapse
