#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dpcollapse/errors.hpp"
#include "dpcollapse/kernels.hpp"
#include "dpcollapse/quadrature.hpp"
#include "dpcollapse/rng.hpp"
#include "dpcollapse/statistics.hpp"

namespace dpcollapse {

using Vec3 = std::array<double, 3>;

/// Scaled units for the dissipative model: hbar = R0 = kB = 1 and G = sqrt(pi),
/// so the non-dissipative collapse rate of mass m is Lambda = m^2.
struct DissipativeKernel {
  double m = 1.0;
  double k = 0.0;  ///< m_r / m

  DissipativeKernel(double m, double k);
  double m_r() const { return k * m; }
};

struct ScaledDissipativeParams {
  double gamma_DP = 0.0;
  double xi_DP = 0.0;
  double T = 0.0;  ///< +inf for k = 0
};

ScaledDissipativeParams scaled_params(const DissipativeKernel& kernel);

/// 2 pi Q^2 |L(Q, p)|^2 with u = cos(angle between Q and p): (m^2/sqrt(pi)) exp(-((1+k)Q + 2k p u)^2).
double rate_density(const DissipativeKernel& kernel, double Q, double u, double p);

/// m^2 / (1 + k), independent of p.
double total_rate(const DissipativeKernel& kernel, double p);
/// The same integral by nested quadrature.
quadrature::QuadratureResult total_rate_quadrature(const DissipativeKernel& kernel, double p,
                                                   double rel_tol = quadrature::kDefaultRelTol);
/// Scaled dE/dt for a momentum eigenstate of magnitude p, by quadrature.
quadrature::QuadratureResult energy_moment_quadrature(const DissipativeKernel& kernel, double p,
                                                      double rel_tol = quadrature::kDefaultRelTol);

/// Parameter range of a KickSampler was exceeded.
class ExtrapolationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Exact inverse-CDF sampler for the kick distribution.
///
/// The polar marginal is erfc(b u)/2 with b = 2 k p and is inverted by Newton
/// iteration on its closed-form CDF; given u, y = (1+k)Q + b u is a Gaussian
/// truncated to y >= b u and is inverted with erfc_inv.
class KickSampler {
 public:
  explicit KickSampler(const DissipativeKernel& kernel, double max_momentum = 1e4);

  const DissipativeKernel& kernel() const { return kernel_; }
  double max_momentum() const { return max_momentum_; }

  /// CDF of u = cos(angle) at momentum magnitude p.
  double polar_cdf(double u, double p) const;
  /// P(kick magnitude <= Q | u, p).
  double radial_cdf(double Q, double u, double p) const;
  double sample_polar(double p, Rng& rng) const;
  double sample_radial(double u, double p, Rng& rng) const;

  /// Kick vector for a particle of momentum p. Throws ExtrapolationError if |p| > max_momentum.
  Vec3 sample(const Vec3& p, Rng& rng) const;

 private:
  DissipativeKernel kernel_;
  double max_momentum_;
};

struct MomentumEnsemble {
  std::vector<Vec3> momenta;
  double time = 0.0;
  std::uint64_t seed = 0;
};

/// Isotropic Maxwellian with per-axis variance m * T.
MomentumEnsemble maxwell_ensemble(std::size_t n, double m, double T, std::uint64_t seed);

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> mean_energy;
  std::vector<double> std_error;
};

struct EvolveResult {
  MomentumEnsemble final;
  EnergySeries series;
};

/// 0 followed by `count - 1` log-spaced times ending at t_final (first at t_final / 1000).
std::vector<double> log_checkpoints(double t_final, int count = 32);

/// Per-particle Gillespie evolution; particle i uses substream(seed, i).
EvolveResult evolve_ensemble(const MomentumEnsemble& ensemble, const KickSampler& sampler, double t_final,
                             std::uint64_t seed, const std::vector<double>& checkpoints,
                             ExecPolicy policy = ExecPolicy::serial);

struct ThermalizationResult {
  double T_estimate = 0.0;
  double T_std_error = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
};

/// Equipartition temperature and KS test of |p| against the Maxwell speed law at
/// `T_reference` (or at the estimate itself when T_reference <= 0).
ThermalizationResult thermalization_test(const MomentumEnsemble& final, const DissipativeKernel& kernel,
                                         double T_reference = 0.0);

double kinetic_energy(const Vec3& p, double m);

}  // namespace dpcollapse
