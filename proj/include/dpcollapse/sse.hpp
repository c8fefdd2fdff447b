#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpcollapse/master_equation.hpp"
#include "dpcollapse/rng.hpp"
#include "dpcollapse/statistics.hpp"

namespace dpcollapse {

struct WaveFunctionLattice {
  Grid1D grid;
  CVector psi;
  double mass = 1.0;
};

/// Spatially correlated noise: C_ij = Lambda - D(|x_i - x_j|) with its Cholesky factor.
struct NoiseModel {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd factor;  ///< lower triangular, factor * factor^T = covariance + jitter
  double lambda = 0.0;

  bool silent() const { return lambda == 0.0; }
};

/// Requires spacing <= d/2. Adds 1e-12 C_ii jitter before factorising; a failed
/// factorisation is a ConfigError.
NoiseModel build_noise_covariance(const DecoherenceKernel& kernel, const Grid1D& grid);

/// One Ito Euler-Maruyama step (exact kinetic substep first), then renormalisation.
/// Throws StepSizeError if dt * Lambda > 1e-3 or the pre-renormalisation norm < 1e-6.
/// Returns the pre-renormalisation norm.
double sse_step(WaveFunctionLattice& state, const NoiseModel& noise, const SpectralPropagator& kinetic, double dt,
                Rng& rng);

struct Observable {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
};

struct EnsembleResult {
  DensityMatrixGrid mean_rho;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<Observable> statistics;
};

struct SseRunOptions {
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  ExecPolicy policy = ExecPolicy::serial;
};

/// Trajectory i draws from substream(seed, i); the ensemble mean is an ordered reduction.
EnsembleResult run_ensemble(const WaveFunctionLattice& psi0, const NoiseModel& noise, const KineticOperator& kinetic,
                            const SseRunOptions& opt);

struct CollapseStatistics {
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  std::size_t n_unresolved = 0;
  std::size_t n_traj = 0;
  double freq_left = 0.0;
  double freq_right = 0.0;
  stats::Interval ci_left;
  stats::Interval ci_right;
  double weight_left = 0.0;  ///< initial |a|^2
  double std_error = 0.0;    ///< binomial standard error at the initial weight
  double chi_square = 0.0;
  double p_value = 1.0;
  bool inconclusive = false;  ///< more than 10% unresolved
};

/// Runs the ensemble and classifies each final state by which half of the grid
/// (sites below / from `split_site`) carries more than 95% of the norm.
CollapseStatistics collapse_statistics(const WaveFunctionLattice& psi0, int split_site, const NoiseModel& noise,
                                       const KineticOperator& kinetic, const SseRunOptions& opt);

}  // namespace dpcollapse
