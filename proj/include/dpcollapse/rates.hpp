#pragma once

#include <optional>
#include <vector>

#include "dpcollapse/units.hpp"

namespace dpcollapse {

/// erf(z)/z, continuous through z = 0.
double erf_over_x(double z);

/// 1 - sqrt(pi) erf(x/2)/x: the DP decoherence profile in units of R0 and Lambda_DP.
double dp_profile(double x);
/// 1 - exp(-x^2/4): the CSL decoherence profile in units of r_c and Lambda_CSL.
double csl_profile(double x);

/// Newtonian self-interaction of two Gaussian-smeared masses at separation delta, in J.
double self_energy_U(double delta, double m, double R0, const PhysicalConstants& c = {});

/// Fourier transform of the one-particle CSL rate, in 1/s. csl_phi(0) = Lambda_CSL.
double csl_phi(double delta, double m, const CSLParams& csl);

/// Lambda_DP = G m^2 / (sqrt(pi) hbar R0) or Lambda_CSL = (m/m0)^2 gamma / (4 pi r_c^2)^(3/2).
double collapse_rate_point(ModelKind model, double m, const ModelParams& params);

/// Coarse-graining damping function f(Q) multiplying the bare 1/Q^2 DP rate.
double damping_function(double Q, double R0, CoarseGraining shape, double hbar = PhysicalConstants{}.hbar);

/// Position-space decoherence function D(delta) = Lambda * profile(delta / d).
///
/// For DP D(delta) = (U(delta) - U(0))/hbar with d = R0; for CSL
/// D(delta) = Phi(0) - Phi(delta) with d = r_c. The complement Lambda - D(delta)
/// is the noise correlation used by the stochastic unraveling.
class DecoherenceKernel {
 public:
  DecoherenceKernel(ModelKind model, double length, double rate);

  static DecoherenceKernel from_params(ModelKind model, double mass, const ModelParams& params);
  /// Dimensionless kernel with d = 1 and Lambda = 1.
  static DecoherenceKernel scaled(ModelKind model) { return {model, 1.0, 1.0}; }
  /// Identically zero kernel (no collapse), used to switch decoherence off.
  static DecoherenceKernel zero(ModelKind model = ModelKind::dp) { return {model, 1.0, 0.0}; }

  ModelKind model() const { return model_; }
  double length() const { return length_; }
  double rate() const { return rate_; }

  double evaluate(double delta) const;
  double complement(double delta) const;

 private:
  ModelKind model_;
  double length_;
  double rate_;
};

/// tau = 1 / D(delta). Returns nullopt for the no-decay case D(delta) = 0
/// (diagonal elements, or a switched-off kernel).
std::optional<double> damping_time(const DecoherenceKernel& kernel, double delta);

/// Fourier transform of a rigid body's mass density, in kg.
double form_factor(const RigidBodySpec& body, double Q, double hbar = PhysicalConstants{}.hbar);

/// Center-of-mass collapse rate in the Gaussian form-factor approximation.
double collapse_rate_cm(ModelKind model, const RigidBodySpec& body, const ModelParams& params);

struct HeatingRate {
  double power;             ///< J/s
  double temperature_rate;  ///< K/s, E = (3/2) kB T convention
};

HeatingRate heating_rate(double m, double R0, const PhysicalConstants& c = {});

struct DissipativeCoeffs {
  double gamma_DP = 0;  ///< J/s
  double xi_DP = 0;     ///< 1/s
  double T = 0;         ///< K; +inf when m_r = 0
  double k = 0;
  bool infinite_temperature = false;
};

DissipativeCoeffs dissipative_coeffs(double m, const DPParams& dp, const PhysicalConstants& c = {});

/// Mean kinetic energy under dE/dt = gamma - xi E.
double energy_trajectory(double E0, double t, double gamma, double xi);
inline double energy_trajectory(double E0, double t, const DissipativeCoeffs& c) {
  return energy_trajectory(E0, t, c.gamma_DP, c.xi_DP);
}

enum class RateModel { dp, csl, dp_cm, csl_cm };

/// Momentum-transfer rate density Gamma(Q) per unit d^3Q.
class RateFunction {
 public:
  /// One-particle rate of mass `mass`.
  RateFunction(RateModel model, double mass, const ModelParams& params);
  /// Center-of-mass rate of a rigid body.
  RateFunction(RateModel model, const RigidBodySpec& body, const ModelParams& params);

  RateModel model() const { return model_; }
  double evaluate(double Q) const;
  /// Radial truncation point beyond which the Gaussian damping makes the integrand negligible.
  double cutoff() const;
  /// Closed-form total rate (Gaussian coarse-graining / form factor).
  double closed_form_total() const;
  double hbar() const { return params_.constants.hbar; }

 private:
  RateModel model_;
  double mass_;
  RigidBodySpec body_;
  ModelParams params_;
};

struct Figure1Row {
  double x;       ///< delta / d
  double dp;      ///< tau * Lambda_DP
  double csl;     ///< tau * Lambda_CSL
};

enum class AxisSpacing { linear, log };

/// Damping time in units of 1/Lambda versus distance in units of d (d = R0 for DP, r_c for CSL).
std::vector<Figure1Row> figure1_dataset(const ModelParams& params, double m, int points,
                                        double x_min = 0.05, double x_max = 50.0,
                                        AxisSpacing spacing = AxisSpacing::log);

}  // namespace dpcollapse
