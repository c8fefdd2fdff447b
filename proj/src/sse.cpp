#include "dpcollapse/sse.hpp"

#include <cmath>
#include <string>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

NoiseModel build_noise_covariance(const DecoherenceKernel& kernel, const Grid1D& grid) {
  grid.validate();
  if (grid.spacing > 0.5 * kernel.length())
    throw ConfigError("grid spacing " + std::to_string(grid.spacing) + " does not resolve the kernel (need <= d/2 = " +
                      std::to_string(0.5 * kernel.length()) + ")");
  const int n = grid.n_sites;
  NoiseModel out;
  out.lambda = kernel.rate();
  out.covariance.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.covariance(i, j) = kernel.complement(std::abs(grid.x(i) - grid.x(j)));
  if (out.silent()) {
    out.factor = Eigen::MatrixXd::Zero(n, n);
    return out;
  }
  Eigen::MatrixXd jittered = out.covariance;
  jittered.diagonal().array() += 1e-12 * out.covariance.diagonal().array();
  Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success)
    throw ConfigError("noise covariance is not positive definite after 1e-12 jitter; factorisation failed");
  out.factor = llt.matrixL();
  return out;
}

double sse_step(WaveFunctionLattice& state, const NoiseModel& noise, const SpectralPropagator& kinetic, double dt,
                Rng& rng) {
  if (!(dt > 0)) throw ParameterError("dt must be > 0");
  if (dt * noise.lambda > 1e-3 * (1 + 1e-12))
    throw StepSizeError("dt * Lambda = " + std::to_string(dt * noise.lambda) + " exceeds the SSE limit 1e-3");
  kinetic.apply(state.psi);
  if (noise.silent()) return state.psi.norm();

  const Eigen::Index n = state.psi.size();
  const Eigen::VectorXd occ = state.psi.cwiseAbs2();
  const Eigen::VectorXd v = noise.covariance * occ;
  const double s = occ.dot(v);
  std::normal_distribution<double> normal;
  Eigen::VectorXd xi(n);
  for (Eigen::Index i = 0; i < n; ++i) xi[i] = normal(rng);
  const Eigen::VectorXd dW = noise.factor.triangularView<Eigen::Lower>() * xi * std::sqrt(dt);
  const double mean_dW = occ.dot(dW);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double drift = -0.5 * (noise.covariance(i, i) - 2 * v[i] + s);
    state.psi[i] *= 1.0 + drift * dt + (dW[i] - mean_dW);
  }
  const double norm = state.psi.norm();
  if (norm < 1e-6) throw StepSizeError("wave function norm collapsed to " + std::to_string(norm) + " in one step");
  state.psi /= norm;
  return norm;
}

namespace {


CVector evolve_trajectory(const WaveFunctionLattice& psi0, const NoiseModel& noise, const SpectralPropagator& kin,
                          const SseRunOptions& opt, std::size_t index) {
  WaveFunctionLattice st = psi0;
  st.psi = normalized(st.psi);
  Rng rng = substream(opt.seed, index);
  const long steps = static_cast<long>(std::llround(opt.t_final / opt.dt));
  for (long k = 0; k < steps; ++k) sse_step(st, noise, kin, opt.dt, rng);
  return st.psi;
}

void check_options(const WaveFunctionLattice& psi0, const SseRunOptions& opt) {
  psi0.grid.validate();
  if (psi0.psi.size() != psi0.grid.n_sites) throw ParameterError("wave function does not match the grid");
  if (opt.n_traj < 1) throw ParameterError("n_traj must be >= 1");
  if (!(opt.dt > 0) || opt.t_final < 0) throw ParameterError("need dt > 0 and t_final >= 0");
  const double steps = opt.t_final / opt.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw ParameterError("t_final must be an integer multiple of dt");
}

}  // namespace

EnsembleResult run_ensemble(const WaveFunctionLattice& psi0, const NoiseModel& noise, const KineticOperator& kinetic,
                            const SseRunOptions& opt) {
  check_options(psi0, opt);
  const Grid1D& g = psi0.grid;
  const int n = g.n_sites;
  const SpectralPropagator kin(g, kinetic, opt.dt);

  struct Acc {
    CMatrix rho;
    double sx = 0, sxx = 0, sv = 0, svv = 0;
  };
  auto make = [n] { return Acc{CMatrix::Zero(n, n)}; };
  auto fold = [&](Acc& acc, std::size_t i) {
    const CVector psi = evolve_trajectory(psi0, noise, kin, opt, i);
    acc.rho.noalias() += psi * psi.adjoint();
    const auto [mean, var] = position_moments(g, psi.cwiseAbs2());
    acc.sx += mean;
    acc.sxx += mean * mean;
    acc.sv += var;
    acc.svv += var * var;
  };
  auto merge = [](Acc& total, const Acc& b) {
    total.rho += b.rho;
    total.sx += b.sx;
    total.sxx += b.sxx;
    total.sv += b.sv;
    total.svv += b.svv;
  };
  const Acc acc = ordered_reduce<Acc>(opt.policy, opt.n_traj, make, fold, merge);

  const double N = static_cast<double>(opt.n_traj);
  auto observable = [N](const std::string& name, double s, double ss) {
    const double mean = s / N;
    const double var = N > 1 ? std::max(0.0, (ss - N * mean * mean) / (N - 1)) : 0.0;
    return Observable{name, mean, std::sqrt(var / N)};
  };
  EnsembleResult out;
  out.mean_rho = {g, acc.rho / N, psi0.mass};
  out.n_traj = opt.n_traj;
  out.seed = opt.seed;
  out.statistics = {observable("position_mean", acc.sx, acc.sxx), observable("position_variance", acc.sv, acc.svv)};
  return out;
}

CollapseStatistics collapse_statistics(const WaveFunctionLattice& psi0, int split_site, const NoiseModel& noise,
                                       const KineticOperator& kinetic, const SseRunOptions& opt) {
  check_options(psi0, opt);
  if (split_site <= 0 || split_site >= psi0.grid.n_sites) throw ParameterError("split site must be interior");
  const SpectralPropagator kin(psi0.grid, kinetic, opt.dt);
  auto left_weight = [split_site](const CVector& psi) { return psi.head(split_site).squaredNorm() / psi.squaredNorm(); };

  std::vector<double> weights(opt.n_traj);
  for_each_index(opt.policy, opt.n_traj, [&](std::size_t i) {
    weights[i] = left_weight(evolve_trajectory(psi0, noise, kin, opt, i));
  });

  CollapseStatistics out;
  out.n_traj = opt.n_traj;
  out.weight_left = left_weight(psi0.psi);
  for (double w : weights) {
    if (w > 0.95) ++out.n_left;
    else if (w < 0.05) ++out.n_right;
    else ++out.n_unresolved;
  }
  out.inconclusive = out.n_unresolved * 10 > out.n_traj;
  const std::size_t resolved = out.n_left + out.n_right;
  if (resolved == 0) {
    out.inconclusive = true;
    return out;
  }
  const double R = static_cast<double>(resolved);
  out.freq_left = out.n_left / R;
  out.freq_right = out.n_right / R;
  out.ci_left = stats::wilson_interval(out.n_left, resolved);
  out.ci_right = stats::wilson_interval(out.n_right, resolved);
  const double w = out.weight_left;
  out.std_error = std::sqrt(w * (1 - w) / R);
  if (w > 0 && w < 1) {
    const double eL = R * w, eR = R * (1 - w);
    out.chi_square = (out.n_left - eL) * (out.n_left - eL) / eL + (out.n_right - eR) * (out.n_right - eR) / eR;
    out.p_value = stats::chi_square_pvalue(out.chi_square, 1.0);
  } else {
    const bool exact = (w >= 1 && out.n_right == 0) || (w <= 0 && out.n_left == 0);
    out.p_value = exact ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace dpcollapse
