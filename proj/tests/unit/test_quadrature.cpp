#include <doctest.h>

#include <cmath>

#include "dpcollapse/errors.hpp"
#include "dpcollapse/quadrature.hpp"
#include "oracles.hpp"

using namespace dpcollapse;
using namespace dpcollapse::quadrature;

TEST_CASE("basic integrals") {
  Integrand1D g{[](double x) { return std::exp(-x * x); }};
  const auto r = integrate_radial(g, 1e-12);
  CHECK(r.value == doctest::Approx(std::sqrt(oracle::pi) / 2).epsilon(1e-12));
  CHECK(r.abs_error_estimate < 1e-11);
  Integrand1D zero{[](double) { return 0.0; }, 0.0, 5.0};
  CHECK(integrate_radial(zero).value == 0.0);
  Integrand1D empty{[](double x) { return x; }, 2.0, 2.0};
  CHECK(integrate_radial(empty).value == 0.0);
  CHECK_THROWS_AS(integrate_radial(g, 0.0), ParameterError);
}

TEST_CASE("non-convergence reports the best estimate") {
  Integrand1D nasty{[](double x) { return std::sin(1.0 / x) / x; }, 1e-6, 1.0};
  try {
    integrate_radial(nasty, 1e-12, 20);
    FAIL("expected OracleFailure");
  } catch (const OracleFailure& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0);
  }
}

TEST_CASE("tighter tolerance does not worsen the error") {
  Integrand1D f{[](double x) { return std::log(x) * std::cos(3 * x); }, 1e-300, 2.0};
  const double exact = oracle::simpson([](double x) { return std::log(x) * std::cos(3 * x); }, 1e-14, 2.0, 1e-14);
  double prev = 1.0;
  for (double tol : {1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6}) {
    const double err = std::abs(integrate_radial(f, tol).value - exact);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("determinism") {
  const RateFunction r(RateModel::dp, oracle::amu, preset("diosi"));
  const auto a = total_rate(r), b = total_rate(r);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("total rates agree with the closed forms") {
  const auto p = preset("diosi");
  for (auto model : {RateModel::dp, RateModel::csl}) {
    const RateFunction r(model, oracle::amu, p);
    CHECK(total_rate(r).value == doctest::Approx(r.closed_form_total()).epsilon(1e-8));
  }
  const RigidBodySpec body{1e9 * oracle::amu, 50e-9, FormFactorShape::gaussian_approx};
  for (auto model : {RateModel::dp_cm, RateModel::csl_cm}) {
    const RateFunction r(model, body, p);
    CHECK(total_rate(r).value == doctest::Approx(r.closed_form_total()).epsilon(1e-8));
  }
  auto sphere = p;
  sphere.dp.coarse_graining = CoarseGraining::sphere;
  const RateFunction rs(RateModel::dp, oracle::amu, sphere);
  CHECK(std::isfinite(total_rate(rs, 1e-7).value));
  CHECK(total_rate(rs, 1e-7).value > 0);
}

TEST_CASE("Fourier transform reproduces the position-space kernel") {
  const auto p = preset("diosi");
  const RateFunction dp(RateModel::dp, oracle::amu, p);
  const auto kdp = DecoherenceKernel::from_params(ModelKind::dp, oracle::amu, p);
  const RateFunction csl(RateModel::csl, oracle::amu, p);
  const auto kcsl = DecoherenceKernel::from_params(ModelKind::csl, oracle::amu, p);
  for (double x : {0.0, 0.3, 1.0, 4.0, 20.0}) {
    const double dpv = fourier_of_rate(dp, x * 1e-15).value;
    CHECK(dpv == doctest::Approx(kdp.complement(x * 1e-15)).epsilon(1e-7));
    const double u = -oracle::self_energy(x * 1e-15, oracle::amu, 1e-15) / oracle::hbar;
    CHECK(dpv == doctest::Approx(u).epsilon(1e-7));
    CHECK(fourier_of_rate(csl, x * 1e-7).value == doctest::Approx(kcsl.complement(x * 1e-7)).epsilon(1e-7));
  }
}

TEST_CASE("heating moment") {
  const RateFunction r(RateModel::dp, oracle::proton, preset("diosi"));
  CHECK(heating_moment(r, oracle::proton).value ==
        doctest::Approx(heating_rate(oracle::proton, 1e-15).power).epsilon(1e-8));
}

TEST_CASE("smeared self energy") {
  for (double x : {0.0, 0.5, 2.0, 10.0}) {
    const double q = smeared_self_energy(x * 1e-15, oracle::amu, 1e-15).value;
    CHECK(q == doctest::Approx(oracle::self_energy(x * 1e-15, oracle::amu, 1e-15)).epsilon(1e-8));
  }
}

TEST_CASE("dissipative energy moment") {
  DPParams dp;
  dp.R0 = 1e-15;
  const double m = oracle::amu;
  for (double k : {0.0, 0.5, 10.0}) {
    dp.m_r = k * m;
    const auto c = dissipative_coeffs(m, dp);
    CHECK(dissipative_energy_moment({0, 0, 0}, m, dp).value == doctest::Approx(c.gamma_DP).epsilon(1e-8));
    const double p = 2 * oracle::hbar / dp.R0;
    const double expect = c.gamma_DP - c.xi_DP * p * p / (2 * m);
    CHECK(dissipative_energy_moment({0, 0, p}, m, dp).value == doctest::Approx(expect).epsilon(1e-7));
  }
}
