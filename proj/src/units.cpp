#include "dpcollapse/units.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "dpcollapse/errors.hpp"
#include "dpcollapse/rates.hpp"

namespace dpcollapse {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void PhysicalConstants::validate() const {
  require(G > 0 && hbar > 0 && kB > 0 && amu > 0, "physical constants must be strictly positive");
}

void DPParams::validate() const {
  require(finite(R0) && R0 > 0, "R0 must be > 0");
  require(finite(m_r) && m_r >= 0, "m_r must be >= 0");
}

void CSLParams::validate() const {
  require(finite(gamma) && gamma > 0, "gamma must be > 0");
  require(finite(r_c) && r_c > 0, "r_c must be > 0");
  require(finite(m0) && m0 > 0, "m0 must be > 0");
}

void ParticleSpec::validate() const { require(finite(m) && m >= 0, "mass must be >= 0"); }

void RigidBodySpec::validate() const {
  require(finite(M) && M >= 0, "M must be >= 0");
  require(finite(R) && R >= 0, "R must be >= 0");
}

void ModelParams::validate() const {
  constants.validate();
  dp.validate();
  csl.validate();
}

ModelParams preset(PresetName name) {
  ModelParams p;
  p.preset_name = std::string(to_string(name));
  switch (name) {
    case PresetName::diosi:
      p.kind = ModelKind::dp;
      p.dp.R0 = 1e-15;
      p.provenance = "overheating section: original cut-off R0 = 1e-15 m (nucleon Compton wavelength)";
      break;
    case PresetName::ghirardi:
      p.kind = ModelKind::dp;
      p.dp.R0 = 1e-7;
      p.provenance = "overheating section: enlarged cut-off R0 = 1e-7 m";
      break;
    case PresetName::csl_grw:
      p.kind = ModelKind::csl;
      p.csl.gamma = 1e-36;
      p.provenance = "CSL comparison section: gamma = 1e-36 m^3/s, r_c = 1e-7 m, m0 = 1 amu";
      break;
    case PresetName::csl_adler:
      p.kind = ModelKind::csl;
      p.csl.gamma = 1e-28;
      p.provenance = "CSL comparison section: enhanced gamma = 1e-28 m^3/s, r_c = 1e-7 m, m0 = 1 amu";
      break;
  }
  p.csl.r_c = 1e-7;
  p.csl.m0 = p.constants.amu;
  p.validate();
  return p;
}

PresetName parse_preset_name(std::string_view name) {
  if (name == "diosi") return PresetName::diosi;
  if (name == "ghirardi") return PresetName::ghirardi;
  if (name == "csl_grw") return PresetName::csl_grw;
  if (name == "csl_adler") return PresetName::csl_adler;
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected diosi, ghirardi, csl_grw or csl_adler)");
}

ModelParams preset(std::string_view name) { return preset(parse_preset_name(name)); }

std::string_view to_string(PresetName name) {
  switch (name) {
    case PresetName::diosi: return "diosi";
    case PresetName::ghirardi: return "ghirardi";
    case PresetName::csl_grw: return "csl_grw";
    case PresetName::csl_adler: return "csl_adler";
  }
  return "?";
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::dp ? "dp" : "csl"; }

ModelKind parse_model_kind(std::string_view name) {
  if (name == "dp") return ModelKind::dp;
  if (name == "csl") return ModelKind::csl;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected dp or csl)");
}

// ---------------------------------------------------------------------------

Dimension dimension_of(Unit u) {
  switch (u) {
    case Unit::kg: case Unit::g: case Unit::amu: return Dimension::mass;
    case Unit::m: case Unit::nm: case Unit::um: case Unit::fm: return Dimension::length;
    case Unit::J: case Unit::eV: case Unit::K_kinetic: return Dimension::energy;
    case Unit::s: return Dimension::time;
    case Unit::per_s: return Dimension::rate;
    case Unit::m3_per_s: return Dimension::diffusion_strength;
  }
  throw UnitError("unknown unit");
}

double si_factor(Unit u, const PhysicalConstants& c) {
  switch (u) {
    case Unit::kg: return 1.0;
    case Unit::g: return 1e-3;
    case Unit::amu: return c.amu;
    case Unit::m: return 1.0;
    case Unit::nm: return 1e-9;
    case Unit::um: return 1e-6;
    case Unit::fm: return 1e-15;
    case Unit::J: return 1.0;
    case Unit::eV: return 1.602176634e-19;
    case Unit::K_kinetic: return 1.5 * c.kB;
    case Unit::s: return 1.0;
    case Unit::per_s: return 1.0;
    case Unit::m3_per_s: return 1.0;
  }
  throw UnitError("unknown unit");
}

double convert(double value, Unit from, Unit to, const PhysicalConstants& c) {
  if (dimension_of(from) != dimension_of(to)) {
    throw UnitError("cannot convert " + std::string(to_string(from)) + " to " +
                    std::string(to_string(to)) + ": incompatible dimensions");
  }
  if (from == to) return value;
  return value * (si_factor(from, c) / si_factor(to, c));
}

namespace {
constexpr std::array<std::pair<std::string_view, Unit>, 17> kUnitSymbols{{
    {"kg", Unit::kg}, {"g", Unit::g}, {"amu", Unit::amu}, {"u", Unit::amu},
    {"m", Unit::m}, {"nm", Unit::nm}, {"um", Unit::um}, {"fm", Unit::fm},
    {"J", Unit::J}, {"eV", Unit::eV}, {"K", Unit::K_kinetic},
    {"s", Unit::s}, {"1/s", Unit::per_s}, {"s^-1", Unit::per_s}, {"Hz", Unit::per_s},
    {"m^3/s", Unit::m3_per_s}, {"m3/s", Unit::m3_per_s},
}};
}  // namespace

Unit parse_unit(std::string_view symbol) {
  for (const auto& [s, u] : kUnitSymbols)
    if (s == symbol) return u;
  throw UnitError("unknown unit symbol '" + std::string(symbol) + "'");
}

std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::kg: return "kg";
    case Unit::g: return "g";
    case Unit::amu: return "amu";
    case Unit::m: return "m";
    case Unit::nm: return "nm";
    case Unit::um: return "um";
    case Unit::fm: return "fm";
    case Unit::J: return "J";
    case Unit::eV: return "eV";
    case Unit::K_kinetic: return "K";
    case Unit::s: return "s";
    case Unit::per_s: return "1/s";
    case Unit::m3_per_s: return "m^3/s";
  }
  return "?";
}

// ---------------------------------------------------------------------------

double ScaleSet::unit_of(Quantity q) const {
  switch (q) {
    case Quantity::length: return length_scale;
    case Quantity::time: return time_scale;
    case Quantity::energy: return energy_scale;
    case Quantity::mass: return mass_scale;
    case Quantity::momentum: return momentum_scale;
    case Quantity::rate: return 1.0 / time_scale;
  }
  return 1.0;
}

ScaleSet dimensionless_scaling(const ModelParams& params, const ParticleSpec& particle) {
  params.validate();
  particle.validate();
  const double lambda = collapse_rate_point(params.kind, particle.m, params);
  if (!(lambda > 0)) throw ParameterError("degenerate scale: collapse rate is zero (zero mass)");
  const double hbar = params.constants.hbar;
  const double d = params.kind == ModelKind::dp ? params.dp.R0 : params.csl.r_c;
  ScaleSet s;
  s.length_scale = d;
  s.time_scale = 1.0 / lambda;
  s.energy_scale = hbar * lambda;
  s.mass_scale = hbar / (lambda * d * d);
  s.momentum_scale = hbar / d;
  return s;
}

}  // namespace dpcollapse
