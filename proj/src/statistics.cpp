#include "dpcollapse/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "dpcollapse/errors.hpp"

namespace dpcollapse::stats {

double kolmogorov_pvalue(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KSResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ParameterError("KS test needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, kolmogorov_pvalue(d, samples.size())};
}

double maxwell_speed_cdf(double p, double s2) {
  if (p <= 0) return 0.0;
  const double x = p / std::sqrt(s2);
  return std::erf(x / std::numbers::sqrt2) - std::sqrt(2.0 / std::numbers::pi) * x * std::exp(-0.5 * x * x);
}

KSResult rayleigh_test_3d(const std::vector<std::array<double, 3>>& directions) {
  if (directions.empty()) throw ParameterError("Rayleigh test needs at least one direction");
  std::array<double, 3> s{0, 0, 0};
  for (const auto& v : directions)
    for (int a = 0; a < 3; ++a) s[a] += v[a];
  const double n = static_cast<double>(directions.size());
  const double r2 = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / (n * n);
  const double stat = 3.0 * n * r2;
  return {stat, chi_square_pvalue(stat, 3.0)};
}

double chi_square_pvalue(double statistic, double dof) {
  if (!(dof > 0)) throw ParameterError("chi-square needs dof > 0");
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = successes / nn;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(phat * (1 - phat) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

MeanError mean_and_error(const std::vector<double>& x) {
  if (x.empty()) return {};
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (x.size() - 1) / x.size())};
}

}  // namespace dpcollapse::stats
