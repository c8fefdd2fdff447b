#include "dpcollapse/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

namespace dpcollapse {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

// log erfc(y), using the asymptotic series where erfc underflows.
double log_erfc(double y) {
  if (y < 25.0) return std::log(std::erfc(y));
  const double inv = 1.0 / (2 * y * y);
  return -y * y - std::log(y * kSqrtPi) + std::log1p(-inv + 3 * inv * inv - 15 * inv * inv * inv);
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

}  // namespace

DissipativeKernel::DissipativeKernel(double m_, double k_) : m(m_), k(k_) {
  if (!(m > 0) || !std::isfinite(m)) throw ParameterError("mass must be > 0");
  if (!(k >= 0) || !std::isfinite(k)) throw ParameterError("k must be >= 0");
}

ScaledDissipativeParams scaled_params(const DissipativeKernel& kernel) {
  const double onek3 = std::pow(1 + kernel.k, 3);
  ScaledDissipativeParams out;
  out.gamma_DP = kernel.m / (4 * onek3);
  out.xi_DP = 4 * kernel.m * kernel.m * kernel.k / (3 * onek3);
  out.T = kernel.k > 0 ? 1.0 / (8 * kernel.m_r()) : std::numeric_limits<double>::infinity();
  return out;
}

double rate_density(const DissipativeKernel& kernel, double Q, double u, double p) {
  const double s = (1 + kernel.k) * Q + 2 * kernel.k * p * u;
  return kernel.m * kernel.m / kSqrtPi * std::exp(-s * s);
}

double total_rate(const DissipativeKernel& kernel, double p) {
  if (p < 0) throw ParameterError("momentum magnitude must be >= 0");
  return kernel.m * kernel.m / (1 + kernel.k);
}

namespace {

quadrature::QuadratureResult polar_moment(const DissipativeKernel& kernel, double p, double rel_tol,
                                          const std::function<double(double, double)>& weight) {
  const double k = kernel.k;
  auto f = [&](double Q, double u) { return rate_density(kernel, Q, u, p) * weight(Q, u); };
  auto domain = [k, p](double u) {
    const double centre = std::max(0.0, -2 * k * p * u / (1 + k));
    quadrature::RadialDomain d{0.0, centre + 12.0 / (1 + k), {}};
    if (centre > 0) d.hints.push_back(centre);
    return d;
  };
  return quadrature::integrate_polar(f, domain, {0.0}, rel_tol);
}

}  // namespace

quadrature::QuadratureResult total_rate_quadrature(const DissipativeKernel& kernel, double p, double rel_tol) {
  return polar_moment(kernel, p, rel_tol, [](double, double) { return 1.0; });
}

quadrature::QuadratureResult energy_moment_quadrature(const DissipativeKernel& kernel, double p, double rel_tol) {
  const double m = kernel.m;
  return polar_moment(kernel, p, rel_tol, [m, p](double Q, double u) { return (Q * Q + 2 * p * Q * u) / (2 * m); });
}

// ---------------------------------------------------------------------------

KickSampler::KickSampler(const DissipativeKernel& kernel, double max_momentum)
    : kernel_(kernel), max_momentum_(max_momentum) {
  if (!(max_momentum > 0)) throw ParameterError("sampler momentum range must be > 0");
}

double KickSampler::polar_cdf(double u, double p) const {
  u = std::clamp(u, -1.0, 1.0);
  const double b = 2 * kernel_.k * p;
  if (b == 0.0) return 0.5 * (u + 1);
  // int_{-1}^{u} erfc(b s) ds
  const double w = u * std::erfc(b * u) + std::erfc(-b) +
                   std::exp(-b * b * u * u) * std::expm1(-b * b * (1 - u * u)) / (b * kSqrtPi);
  return std::clamp(0.5 * w, 0.0, 1.0);
}

double KickSampler::radial_cdf(double Q, double u, double p) const {
  if (Q <= 0) return 0.0;
  const double y0 = 2 * kernel_.k * p * u;
  const double y1 = y0 + (1 + kernel_.k) * Q;
  if (y0 < 25.0) return (std::erfc(y0) - std::erfc(y1)) / std::erfc(y0);
  return -std::expm1(log_erfc(y1) - log_erfc(y0));
}

double KickSampler::sample_polar(double p, Rng& rng) const {
  const double v = uniform_open(rng);
  const double b = 2 * kernel_.k * p;
  if (b == 0.0) return 2 * v - 1;
  auto f = [this, p, v, b](double u) {
    return std::make_pair(polar_cdf(u, p) - v, 0.5 * std::erfc(b * u));
  };
  std::uintmax_t iters = 200;
  return boost::math::tools::newton_raphson_iterate(f, 2 * v - 1, -1.0, 1.0, 48, iters);
}

double KickSampler::sample_radial(double u, double p, Rng& rng) const {
  const double y0 = 2 * kernel_.k * p * u;
  double y;
  if (y0 <= 5.0) {
    y = boost::math::erfc_inv(uniform_open(rng) * std::erfc(y0));
  } else {
    // e^{-y^2} on [y0, inf): propose y^2 - y0^2 ~ Exp(1), accept with y0 / y.
    do {
      y = std::sqrt(y0 * y0 - std::log(uniform_open(rng)));
    } while (uniform_open(rng) * y > y0);
  }
  return std::max(0.0, (y - y0) / (1 + kernel_.k));
}

Vec3 KickSampler::sample(const Vec3& p, Rng& rng) const {
  const double pm = norm(p);
  if (!(pm <= max_momentum_))
    throw ExtrapolationError("momentum " + std::to_string(pm) + " outside the sampler range [0, " +
                             std::to_string(max_momentum_) + "]");
  const double u = sample_polar(pm, rng);
  const double Q = sample_radial(u, pm, rng);
  const double phi = 2 * kPi * uniform_open(rng);

  Vec3 e = pm > 0 ? Vec3{p[0] / pm, p[1] / pm, p[2] / pm} : Vec3{0, 0, 1};
  int least = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(e[a]) < std::abs(e[least])) least = a;
  Vec3 a{0, 0, 0};
  a[least] = 1;
  const double ae = a[0] * e[0] + a[1] * e[1] + a[2] * e[2];
  Vec3 e1{a[0] - ae * e[0], a[1] - ae * e[1], a[2] - ae * e[2]};
  const double n1 = norm(e1);
  for (double& c : e1) c /= n1;
  const Vec3 e2 = cross(e, e1);
  const double s = std::sqrt(std::max(0.0, 1 - u * u));
  Vec3 out;
  for (int c = 0; c < 3; ++c) out[c] = Q * (u * e[c] + s * (std::cos(phi) * e1[c] + std::sin(phi) * e2[c]));
  return out;
}

// ---------------------------------------------------------------------------

double kinetic_energy(const Vec3& p, double m) { return (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2 * m); }

MomentumEnsemble maxwell_ensemble(std::size_t n, double m, double T, std::uint64_t seed) {
  if (!(m > 0) || !(T >= 0)) throw ParameterError("need m > 0 and T >= 0");
  MomentumEnsemble out;
  out.seed = seed;
  out.momenta.resize(n);
  const double sigma = std::sqrt(m * T);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = substream(seed, i);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& c : out.momenta[i]) c = normal(rng);
  }
  return out;
}

std::vector<double> log_checkpoints(double t_final, int count) {
  if (!(t_final > 0) || count < 2) throw ParameterError("need t_final > 0 and at least 2 checkpoints");
  std::vector<double> t{0.0};
  const double t0 = t_final * 1e-3;
  for (int i = 0; i < count - 1; ++i) t.push_back(t0 * std::pow(1e3, static_cast<double>(i) / (count - 2)));
  t.back() = t_final;
  return t;
}

EvolveResult evolve_ensemble(const MomentumEnsemble& ensemble, const KickSampler& sampler, double t_final,
                             std::uint64_t seed, const std::vector<double>& checkpoints, ExecPolicy policy) {
  if (t_final < 0) throw ParameterError("t_final must be >= 0");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      (!checkpoints.empty() && (checkpoints.front() < 0 || checkpoints.back() > t_final)))
    throw ParameterError("checkpoints must be sorted and lie in [0, t_final]");
  const std::size_t n = ensemble.momenta.size();
  const std::size_t nc = checkpoints.size();
  const double m = sampler.kernel().m;
  const double rate = total_rate(sampler.kernel(), 0.0);

  EvolveResult out;
  out.final.momenta.resize(n);
  out.final.time = ensemble.time + t_final;
  out.final.seed = seed;

  struct Acc {
    std::vector<double> s, ss;
  };
  auto make = [nc] { return Acc{std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0)}; };
  auto fold = [&](Acc& acc, std::size_t i) {
    Rng rng = substream(seed, i);
    Vec3 p = ensemble.momenta[i];
    double t = 0.0;
    std::size_t c = 0;
    while (true) {
      const double next = t - std::log(uniform_open(rng)) / rate;
      for (; c < nc && checkpoints[c] < next; ++c) {
        const double e = kinetic_energy(p, m);
        acc.s[c] += e;
        acc.ss[c] += e * e;
      }
      if (next > t_final) break;
      const Vec3 q = sampler.sample(p, rng);
      for (int a = 0; a < 3; ++a) p[a] += q[a];
      t = next;
    }
    out.final.momenta[i] = p;
  };
  auto merge = [nc](Acc& total, const Acc& b) {
    for (std::size_t c = 0; c < nc; ++c) {
      total.s[c] += b.s[c];
      total.ss[c] += b.ss[c];
    }
  };
  const Acc acc = ordered_reduce<Acc>(policy, n, make, fold, merge);

  const double N = static_cast<double>(n);
  out.series.times = checkpoints;
  for (std::size_t c = 0; c < nc; ++c) {
    const double mean = n ? acc.s[c] / N : 0.0;
    const double var = n > 1 ? std::max(0.0, (acc.ss[c] - N * mean * mean) / (N - 1)) : 0.0;
    out.series.mean_energy.push_back(mean);
    out.series.std_error.push_back(n > 1 ? std::sqrt(var / N) : 0.0);
  }
  return out;
}

ThermalizationResult thermalization_test(const MomentumEnsemble& final, const DissipativeKernel& kernel,
                                         double T_reference) {
  if (final.momenta.size() < 2) throw ParameterError("thermalization test needs at least 2 particles");
  std::vector<double> energies, speeds;
  for (const auto& p : final.momenta) {
    energies.push_back(kinetic_energy(p, kernel.m));
    speeds.push_back(norm(p));
  }
  const auto e = stats::mean_and_error(energies);
  ThermalizationResult out;
  out.T_estimate = 2.0 * e.mean / 3.0;
  out.T_std_error = 2.0 * e.std_error / 3.0;
  const double T = T_reference > 0 ? T_reference : out.T_estimate;
  const double s2 = kernel.m * T;
  const auto ks = stats::ks_test(speeds, [s2](double p) { return stats::maxwell_speed_cdf(p, s2); });
  out.ks_statistic = ks.statistic;
  out.ks_p_value = ks.p_value;
  return out;
}

}  // namespace dpcollapse
