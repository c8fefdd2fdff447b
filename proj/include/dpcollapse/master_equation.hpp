#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpcollapse/kernels.hpp"
#include "dpcollapse/rates.hpp"

namespace dpcollapse {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Periodic 1D lattice in scaled units (kernel width d = 1, hbar = 1).
struct Grid1D {
  int n_sites = 64;
  double spacing = 0.5;
  double origin = 0.0;

  double x(int i) const { return origin + spacing * i; }
  double length() const { return spacing * n_sites; }
  /// Signed lattice momentum of FFT bin j, 2 pi j' / (n h) with j' in [-n/2, n/2).
  double momentum(int j) const;
  /// Throws ParameterError unless n_sites is a power of two in [16, 1024] and spacing > 0.
  void validate() const;
  /// Throws ConfigError if the box is shorter than 20 kernel lengths.
  void require_box(const DecoherenceKernel& kernel) const;
};

struct DensityMatrixGrid {
  Grid1D grid;
  CMatrix rho;
  double mass = 1.0;

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

/// Free kinetic operator p^2 / 2m; `enabled = false` turns it into the identity.
struct KineticOperator {
  double mass = 1.0;
  bool enabled = true;

  static KineticOperator disabled() { return {1.0, false}; }
};

/// Exact spectral free propagator exp(-i p^2 dt / 2m) on a periodic grid.
class SpectralPropagator {
 public:
  SpectralPropagator(const Grid1D& grid, const KineticOperator& kinetic, double dt);

  bool identity() const { return !enabled_; }
  void apply(CVector& psi) const;
  /// rho -> U rho U^dagger.
  void apply(CMatrix& rho, ExecPolicy policy = ExecPolicy::serial) const;

 private:
  void apply_columns(CMatrix& a, ExecPolicy policy) const;
  bool enabled_;
  CVector phase_;
};

/// D_ij = D(|x_i - x_j|). With `check_box` the box-size invariant is enforced.
Eigen::MatrixXd build_decoherence_matrix(const DecoherenceKernel& kernel, const Grid1D& grid,
                                         bool check_box = true);

/// One Strang step: half kinetic, exp(-D dt) elementwise, half kinetic.
/// Throws StepSizeError if dt * max(D) > 1e-2.
class MasterEquationStepper {
 public:
  MasterEquationStepper(const Eigen::MatrixXd& D, const Grid1D& grid, const KineticOperator& kinetic, double dt,
                        ExecPolicy policy = ExecPolicy::serial);

  void step(DensityMatrixGrid& state) const;
  void run(DensityMatrixGrid& state, long steps) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  ExecPolicy policy_;
  SpectralPropagator half_;
  Eigen::MatrixXd decay_;
};

DensityMatrixGrid step(const DensityMatrixGrid& state, const Eigen::MatrixXd& D, const KineticOperator& kinetic,
                       double dt);

/// Integrates to time t with the largest step <= dt_max that divides t evenly.
DensityMatrixGrid propagate(const DensityMatrixGrid& state, const Eigen::MatrixXd& D,
                            const KineticOperator& kinetic, double t, double dt_max,
                            ExecPolicy policy = ExecPolicy::serial);

/// Closed-form solution along characteristics: free propagation followed by the
/// factor exp(-int_0^t D(r - P tau / m) dtau) on each (offset r, centre momentum P).
DensityMatrixGrid propagate_analytic_free(const DensityMatrixGrid& rho0, double t, const DecoherenceKernel& kernel);

/// (offset delta, mean |rho(x, x + delta)|) for offsets 0 .. n-1 (non-periodic).
std::vector<std::pair<double, double>> coherence_profile(const DensityMatrixGrid& state);

/// (1/2) sum |eig(a - b)|.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Normalised Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i p0 x), unit 2-norm on the lattice.
CVector gaussian_packet(const Grid1D& grid, double x0, double sigma, double p0 = 0.0);
/// sum_i |psi_i|^2 = 1.
CVector normalized(const CVector& psi);
DensityMatrixGrid pure_state(const Grid1D& grid, const CVector& psi, double mass);

/// Position mean and variance of the lattice distribution diag(rho).
std::pair<double, double> position_moments(const Grid1D& grid, const Eigen::VectorXd& weights);

}  // namespace dpcollapse
