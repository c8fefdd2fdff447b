#include <doctest.h>

#include <cmath>

#include "dpcollapse/rng.hpp"
#include "dpcollapse/statistics.hpp"

using namespace dpcollapse;

TEST_CASE("Kolmogorov distribution") {
  CHECK(stats::kolmogorov_pvalue(0.0, 100) == 1.0);
  // Critical value 1.358 at 5% for large n
  CHECK(stats::kolmogorov_pvalue(1.358 / std::sqrt(1e6), 1000000) == doctest::Approx(0.05).epsilon(0.02));
  CHECK(stats::kolmogorov_pvalue(1.0, 100) < 1e-10);
}

TEST_CASE("KS test accepts matching and rejects shifted samples") {
  Rng rng = substream(5, 0);
  std::vector<double> u(5000);
  for (auto& x : u) x = uniform_open(rng);
  auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(stats::ks_test(u, cdf).p_value > 0.01);
  for (auto& x : u) x = std::pow(x, 0.8);
  CHECK(stats::ks_test(u, cdf).p_value < 1e-6);
}

TEST_CASE("Maxwell speed CDF") {
  CHECK(stats::maxwell_speed_cdf(0.0, 1.0) == 0.0);
  CHECK(stats::maxwell_speed_cdf(50.0, 1.0) == doctest::Approx(1.0));
  // median of the chi distribution with 3 dof
  CHECK(stats::maxwell_speed_cdf(1.5381722544550522, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(stats::maxwell_speed_cdf(2 * 1.5381722544550522, 4.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Rayleigh test") {
  Rng rng = substream(9, 1);
  std::normal_distribution<double> n01;
  std::vector<std::array<double, 3>> dirs(4000);
  for (auto& d : dirs) {
    d = {n01(rng), n01(rng), n01(rng)};
    const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    for (auto& c : d) c /= r;
  }
  CHECK(stats::rayleigh_test_3d(dirs).p_value > 0.01);
  for (auto& d : dirs) d[2] = std::abs(d[2]);
  CHECK(stats::rayleigh_test_3d(dirs).p_value < 1e-6);
}

TEST_CASE("chi-square and Wilson") {
  CHECK(stats::chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(stats::chi_square_pvalue(0.0, 3) == 1.0);
  const auto ci = stats::wilson_interval(50, 100);
  CHECK(ci.lower == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(ci.upper == doctest::Approx(0.5962).epsilon(1e-3));
  const auto edge = stats::wilson_interval(0, 10);
  CHECK(edge.lower == 0.0);
  CHECK(edge.upper > 0.2);
}

TEST_CASE("mean and error") {
  const auto me = stats::mean_and_error({1, 2, 3, 4});
  CHECK(me.mean == 2.5);
  CHECK(me.std_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
}

TEST_CASE("substreams are reproducible and distinct") {
  Rng a = substream(1, 2), b = substream(1, 2), c = substream(1, 3), d = substream(2, 2);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}
