#pragma once

#include <string>
#include <string_view>

namespace dpcollapse {

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
  double G = 6.67430e-11;          ///< m^3 kg^-1 s^-2
  double hbar = 1.054571817e-34;   ///< J s
  double kB = 1.380649e-23;        ///< J/K
  double amu = 1.66053906660e-27;  ///< kg

  void validate() const;
};

inline constexpr double kProtonMass = 1.67262192369e-27;  // kg

enum class CoarseGraining { gaussian, sphere };
enum class FormFactorShape { sphere_exact, gaussian_approx };
enum class ModelKind { dp, csl };

struct DPParams {
  double R0 = 1e-15;  ///< coarse-graining cut-off, m
  double m_r = 0.0;   ///< dissipation reference mass, kg (0 = no dissipation)
  CoarseGraining coarse_graining = CoarseGraining::gaussian;

  void validate() const;
};

struct CSLParams {
  double gamma = 1e-36;                   ///< m^3/s
  double r_c = 1e-7;                      ///< m
  double m0 = PhysicalConstants{}.amu;    ///< kg

  void validate() const;
};

struct ParticleSpec {
  double m = 0.0;  ///< kg
  void validate() const;
};

struct RigidBodySpec {
  double M = 0.0;  ///< kg
  double R = 0.0;  ///< m
  FormFactorShape form_factor = FormFactorShape::gaussian_approx;
  void validate() const;
};

/// A resolved parameter set. Both DP and CSL blocks are always populated;
/// `kind` selects the active model.
struct ModelParams {
  ModelKind kind = ModelKind::dp;
  PhysicalConstants constants{};
  DPParams dp{};
  CSLParams csl{};
  std::string preset_name;
  std::string provenance;

  void validate() const;
};

enum class PresetName { diosi, ghirardi, csl_grw, csl_adler };

ModelParams preset(PresetName name);
/// Throws ConfigError for an unknown name.
ModelParams preset(std::string_view name);
PresetName parse_preset_name(std::string_view name);
std::string_view to_string(PresetName name);
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// ---------------------------------------------------------------------------
// Unit conversion

enum class Dimension { mass, length, energy, time, rate, diffusion_strength };

enum class Unit {
  kg, g, amu,
  m, nm, um, fm,
  J, eV, K_kinetic,  // K_kinetic: E = (3/2) kB T
  s,
  per_s,
  m3_per_s,
};

Dimension dimension_of(Unit u);
/// Factor f such that value_in_SI = value * f.
double si_factor(Unit u, const PhysicalConstants& c = {});
/// Throws UnitError when the dimensions differ.
double convert(double value, Unit from, Unit to, const PhysicalConstants& c = {});
/// Accepts "kg", "g", "amu", "m", "nm", "um", "fm", "J", "eV", "K", "s", "1/s", "s^-1", "m^3/s".
Unit parse_unit(std::string_view symbol);
std::string_view to_string(Unit u);

// ---------------------------------------------------------------------------
// Dimensionless scaling for the dynamical modules.
//
// Lengths in units of the kernel width d (R0 or r_c), times in units of 1/Lambda,
// energies in units of hbar*Lambda. The derived mass scale hbar/(Lambda d^2) and
// momentum scale hbar/d make hbar = 1 in scaled units.

enum class Quantity { length, time, energy, mass, momentum, rate };

struct ScaleSet {
  double length_scale = 1.0;  ///< m
  double time_scale = 1.0;    ///< s
  double energy_scale = 1.0;  ///< J
  double mass_scale = 1.0;    ///< kg
  double momentum_scale = 1.0;  ///< kg m / s

  double unit_of(Quantity q) const;
  double to_scaled(double value_si, Quantity q) const { return value_si / unit_of(q); }
  double to_si(double scaled_value, Quantity q) const { return scaled_value * unit_of(q); }
};

/// Throws ParameterError (degenerate scale) when the particle mass is zero.
ScaleSet dimensionless_scaling(const ModelParams& params, const ParticleSpec& particle);

}  // namespace dpcollapse
