#include "dpcollapse/master_equation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "dpcollapse/errors.hpp"
#include "dpcollapse/quadrature.hpp"

namespace dpcollapse {

namespace {

constexpr double kPi = std::numbers::pi;

// kissfft caches twiddles inside the object, so each thread keeps its own.
Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

void fft_forward(std::vector<cplx>& out, const std::vector<cplx>& in) { thread_fft().fwd(out, in); }
void fft_inverse(std::vector<cplx>& out, const std::vector<cplx>& in) { thread_fft().inv(out, in); }

void hermitize(CMatrix& rho) {
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  rho = h;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

double Grid1D::momentum(int j) const {
  const int signed_j = j < n_sites / 2 ? j : j - n_sites;
  return 2 * kPi * signed_j / length();
}

void Grid1D::validate() const {
  const bool pow2 = n_sites > 0 && (n_sites & (n_sites - 1)) == 0;
  if (!pow2 || n_sites < 16 || n_sites > 1024)
    throw ParameterError("n_sites must be a power of two in [16, 1024], got " + std::to_string(n_sites));
  if (!(spacing > 0) || !std::isfinite(spacing)) throw ParameterError("grid spacing must be > 0");
  if (!std::isfinite(origin)) throw ParameterError("grid origin must be finite");
}

void Grid1D::require_box(const DecoherenceKernel& kernel) const {
  if (length() < 20 * kernel.length())
    throw ConfigError("grid too small for the kernel: n_sites*spacing = " + std::to_string(length()) +
                      " < 20 kernel lengths (" + std::to_string(20 * kernel.length()) + ")");
}

double DensityMatrixGrid::trace_error() const { return std::abs(rho.trace() - cplx(1.0, 0.0)); }

double DensityMatrixGrid::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrixGrid::min_eigenvalue() const {
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

SpectralPropagator::SpectralPropagator(const Grid1D& grid, const KineticOperator& kinetic, double dt)
    : enabled_(kinetic.enabled && dt != 0.0) {
  grid.validate();
  if (kinetic.enabled && !(kinetic.mass > 0)) throw ParameterError("kinetic mass must be > 0");
  phase_.resize(grid.n_sites);
  for (int j = 0; j < grid.n_sites; ++j) {
    const double p = grid.momentum(j);
    phase_[j] = enabled_ ? std::polar(1.0, -p * p * dt / (2 * kinetic.mass)) : cplx(1.0, 0.0);
  }
}

void SpectralPropagator::apply(CVector& psi) const {
  if (!enabled_) return;
  std::vector<cplx> in(psi.data(), psi.data() + psi.size()), out;
  fft_forward(out, in);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= phase_[j];
  fft_inverse(in, out);
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = in[i];
}

void SpectralPropagator::apply_columns(CMatrix& a, ExecPolicy policy) const {
  for_each_index(policy, static_cast<std::size_t>(a.cols()), [&](std::size_t c) {
    CVector col = a.col(c);
    apply(col);
    a.col(c) = col;
  });
}

void SpectralPropagator::apply(CMatrix& rho, ExecPolicy policy) const {
  if (!enabled_) return;
  apply_columns(rho, policy);
  rho = rho.adjoint().eval();
  apply_columns(rho, policy);
  rho = rho.adjoint().eval();
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd build_decoherence_matrix(const DecoherenceKernel& kernel, const Grid1D& grid, bool check_box) {
  grid.validate();
  if (check_box) grid.require_box(kernel);
  const int n = grid.n_sites;
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) D(i, j) = D(j, i) = kernel.evaluate(std::abs(grid.x(i) - grid.x(j)));
  }
  return D;
}

MasterEquationStepper::MasterEquationStepper(const Eigen::MatrixXd& D, const Grid1D& grid,
                                             const KineticOperator& kinetic, double dt, ExecPolicy policy)
    : dt_(dt), policy_(policy), half_(grid, kinetic, 0.5 * dt) {
  if (!(dt > 0)) throw ParameterError("dt must be > 0");
  if (D.rows() != grid.n_sites || D.cols() != grid.n_sites)
    throw ParameterError("decoherence matrix does not match the grid");
  const double dmax = D.maxCoeff();
  if (dt * dmax > 1e-2)
    throw StepSizeError("dt * max(D) = " + std::to_string(dt * dmax) + " exceeds the splitting limit 1e-2");
  decay_ = (-dt * D.array()).exp().matrix();
}

void MasterEquationStepper::step(DensityMatrixGrid& state) const {
  half_.apply(state.rho, policy_);
  const Eigen::Index n = state.rho.cols();
  for_each_index(policy_, static_cast<std::size_t>(n), [&](std::size_t c) {
    state.rho.col(c).array() *= decay_.col(c).array().cast<cplx>();
  });
  half_.apply(state.rho, policy_);
  if (!half_.identity()) hermitize(state.rho);
}

void MasterEquationStepper::run(DensityMatrixGrid& state, long steps) const {
  for (long s = 0; s < steps; ++s) step(state);
}

DensityMatrixGrid step(const DensityMatrixGrid& state, const Eigen::MatrixXd& D, const KineticOperator& kinetic,
                       double dt) {
  DensityMatrixGrid out = state;
  MasterEquationStepper(D, state.grid, kinetic, dt).step(out);
  return out;
}

DensityMatrixGrid propagate(const DensityMatrixGrid& state, const Eigen::MatrixXd& D,
                            const KineticOperator& kinetic, double t, double dt_max, ExecPolicy policy) {
  if (t < 0) throw ParameterError("t must be >= 0");
  if (!(dt_max > 0)) throw ParameterError("dt must be > 0");
  DensityMatrixGrid out = state;
  if (t == 0) return out;
  const long steps = static_cast<long>(std::ceil(t / dt_max - 1e-9));
  MasterEquationStepper(D, state.grid, kinetic, t / steps, policy).run(out, steps);
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrixGrid propagate_analytic_free(const DensityMatrixGrid& rho0, double t, const DecoherenceKernel& kernel) {
  if (t < 0) throw ParameterError("t must be >= 0");
  DensityMatrixGrid out = rho0;
  if (t == 0) return out;
  const Grid1D& g = rho0.grid;
  const int n = g.n_sites;
  const double m = rho0.mass;
  SpectralPropagator(g, {m, true}, t).apply(out.rho);

  // Decay exponent int_0^t D(|r - P tau / m|) dtau.
  auto exponent = [&](double r, double P) {
    if (P == 0.0) return t * kernel.evaluate(std::abs(r));
    quadrature::Integrand1D f{[&](double tau) { return kernel.evaluate(std::abs(r - P * tau / m)); }, 0.0, t};
    const double crossing = r * m / P;
    if (crossing > 0 && crossing < t) f.singularity_hints.push_back(crossing);
    return quadrature::integrate_radial(f, 1e-10).value;
  };

  std::vector<cplx> diag(n), spec(n);
  for (int jr = -n / 2; jr < n / 2; ++jr) {
    const double r = jr * g.spacing;
    for (int s = 0; s < n; ++s) diag[s] = out.rho(wrap(s + jr, n), s);
    fft_forward(spec, diag);
    for (int k = 0; k < n; ++k) spec[k] *= std::exp(-exponent(r, g.momentum(k)));
    fft_inverse(diag, spec);
    for (int s = 0; s < n; ++s) out.rho(wrap(s + jr, n), s) = diag[s];
  }
  return out;
}

std::vector<std::pair<double, double>> coherence_profile(const DensityMatrixGrid& state) {
  const int n = state.grid.n_sites;
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i + j < n; ++i) sum += std::abs(state.rho(i, i + j));
    out.emplace_back(j * state.grid.spacing, sum / (n - j));
  }
  return out;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  const CMatrix h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CVector normalized(const CVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0)) throw ParameterError("cannot normalise a zero wave function");
  return psi / norm;
}

CVector gaussian_packet(const Grid1D& grid, double x0, double sigma, double p0) {
  if (!(sigma > 0)) throw ParameterError("packet width must be > 0");
  CVector psi(grid.n_sites);
  for (int i = 0; i < grid.n_sites; ++i) {
    const double dx = grid.x(i) - x0;
    psi[i] = std::polar(std::exp(-dx * dx / (4 * sigma * sigma)), p0 * grid.x(i));
  }
  return normalized(psi);
}

DensityMatrixGrid pure_state(const Grid1D& grid, const CVector& psi, double mass) {
  grid.validate();
  if (psi.size() != grid.n_sites) throw ParameterError("wave function does not match the grid");
  const CVector v = normalized(psi);
  return {grid, v * v.adjoint(), mass};
}

std::pair<double, double> position_moments(const Grid1D& grid, const Eigen::VectorXd& weights) {
  double w = 0, mean = 0, sq = 0;
  for (int i = 0; i < grid.n_sites; ++i) {
    w += weights[i];
    mean += weights[i] * grid.x(i);
  }
  mean /= w;
  for (int i = 0; i < grid.n_sites; ++i) sq += weights[i] * (grid.x(i) - mean) * (grid.x(i) - mean);
  return {mean, sq / w};
}

}  // namespace dpcollapse
