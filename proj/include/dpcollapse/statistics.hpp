#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace dpcollapse::stats {

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function with the Stephens small-n correction.
double kolmogorov_pvalue(double d, std::size_t n);

/// One-sample Kolmogorov-Smirnov test. `samples` is copied and sorted.
KSResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// CDF of the Maxwell speed law for |p| with per-axis variance s2 = m kB T.
double maxwell_speed_cdf(double p, double s2);

/// Rayleigh test for uniformity of unit vectors on the sphere: 3 n |mean|^2 ~ chi^2(3).
KSResult rayleigh_test_3d(const std::vector<std::array<double, 3>>& directions);

/// Upper tail of the chi-square distribution.
double chi_square_pvalue(double statistic, double dof);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

/// Mean and standard error of the mean.
struct MeanError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanError mean_and_error(const std::vector<double>& x);

}  // namespace dpcollapse::stats
