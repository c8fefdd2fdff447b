#include <doctest.h>

#include <cmath>

#include "dpcollapse/errors.hpp"
#include "dpcollapse/master_equation.hpp"
#include "dpcollapse/quadrature.hpp"
#include "oracles.hpp"

using namespace dpcollapse;

namespace {

DensityMatrixGrid cat_state(const Grid1D& g, double separation, double sigma, double mass) {
  const double c = g.x(0) + 0.5 * g.length();
  const CVector psi = gaussian_packet(g, c - 0.5 * separation, sigma) + gaussian_packet(g, c + 0.5 * separation, sigma);
  return pure_state(g, psi, mass);
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((Grid1D{12, 0.5}).validate(), ParameterError);
  CHECK_THROWS_AS((Grid1D{2048, 0.5}).validate(), ParameterError);
  CHECK_THROWS_AS((Grid1D{64, 0.0}).validate(), ParameterError);
  CHECK_NOTHROW((Grid1D{16, 0.5}).validate());
  const Grid1D g{64, 0.5};
  CHECK(g.momentum(1) == doctest::Approx(2 * oracle::pi / 32));
  CHECK(g.momentum(63) == doctest::Approx(-2 * oracle::pi / 32));
  CHECK(g.momentum(32) == doctest::Approx(-oracle::pi / 0.5));
}

TEST_CASE("decoherence matrix") {
  const auto k = DecoherenceKernel::scaled(ModelKind::dp);
  const Grid1D g{64, 0.5};
  const auto D = build_decoherence_matrix(k, g);
  CHECK(D.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(D.minCoeff() >= 0.0);
  CHECK(D.maxCoeff() <= 1.0);
  CHECK_THROWS_AS(build_decoherence_matrix(k, Grid1D{16, 0.5}), ConfigError);
  CHECK_NOTHROW(build_decoherence_matrix(k, Grid1D{16, 0.5}, false));
}

TEST_CASE("matrix entries match the Fourier transform of the rate") {
  // Scaled DP and CSL kernels built from SI presets, compared against quadrature.
  const auto p = preset("diosi");
  const RateFunction rdp(RateModel::dp, oracle::amu, p);
  const auto kdp = DecoherenceKernel::from_params(ModelKind::dp, oracle::amu, p);
  const Grid1D g{64, 0.5};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::dp), g);
  for (int j : {1, 3, 10, 31}) {
    const double delta = j * 0.5 * p.dp.R0;
    const double q = kdp.rate() - quadrature::fourier_of_rate(rdp, delta).value;
    CHECK(D(0, j) * kdp.rate() == doctest::Approx(q).epsilon(1e-8));
  }
}

TEST_CASE("far pair decays at the full rate") {
  const Grid1D g{1024, 4.0};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::csl), g);
  CHECK(D(0, 1023) == doctest::Approx(1.0).epsilon(1e-12));
  const auto Ddp = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::dp), g);
  CHECK(Ddp(0, 1023) == doctest::Approx(1 - std::sqrt(oracle::pi) / 4092).epsilon(1e-12));
}

TEST_CASE("free packet spreads by the textbook law") {
  const Grid1D g{128, 0.4};
  const double sigma = 1.5, m = 4.0, t = 3.0;
  const auto rho0 = pure_state(g, gaussian_packet(g, 25.6, sigma), m);
  const Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g.n_sites, g.n_sites);
  const auto rho = propagate(rho0, D, {m, true}, t, 0.05);
  const auto [mean, var] = position_moments(g, rho.rho.diagonal().real());
  const double expect = sigma * sigma + std::pow(t / (2 * m * sigma), 2);
  CHECK(var == doctest::Approx(expect).epsilon(1e-6));
  CHECK(mean == doctest::Approx(25.6).epsilon(1e-9));
}

TEST_CASE("pure decoherence decays exponentially") {
  const Grid1D g{64, 0.4};
  const auto k = DecoherenceKernel::scaled(ModelKind::dp);
  const auto D = build_decoherence_matrix(k, g);
  const auto rho0 = cat_state(g, 5.0, 0.8, 1.0);
  const double t = 2.0;
  const auto rho = propagate(rho0, D, KineticOperator::disabled(), t, 0.005);
  double worst = 0;
  for (int i = 0; i < g.n_sites; ++i)
    for (int j = 0; j < g.n_sites; ++j) {
      const cplx expect = rho0.rho(i, j) * std::exp(-t * D(i, j));
      if (std::abs(rho0.rho(i, j)) > 1e-8) worst = std::max(worst, std::abs(rho.rho(i, j) / expect - 1.0));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("Strang splitting converges at second order") {
  const Grid1D g{32, 0.75};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::csl), g);
  const auto rho0 = cat_state(g, 4.0, 1.0, 1.0);
  const KineticOperator kin{1.0, true};
  const auto a = propagate(rho0, D, kin, 1.0, 0.008);
  const auto b = propagate(rho0, D, kin, 1.0, 0.004);
  const auto c = propagate(rho0, D, kin, 1.0, 0.002);
  const double ratio = (a.rho - b.rho).norm() / (b.rho - c.rho).norm();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("analytic free solution") {
  const Grid1D g{64, 0.4};
  const auto rho0 = cat_state(g, 5.0, 1.0, 4.0);
  const auto k = DecoherenceKernel::scaled(ModelKind::dp);
  CHECK(propagate_analytic_free(rho0, 0.0, k).rho == rho0.rho);
  // zero kernel reduces to free propagation
  const auto free = propagate_analytic_free(rho0, 2.0, DecoherenceKernel::zero());
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(64, 64);
  CHECK(trace_distance(free.rho, propagate(rho0, Z, {4.0, true}, 2.0, 0.5).rho) < 1e-12);
  for (auto model : {ModelKind::dp, ModelKind::csl}) {
    const auto kern = DecoherenceKernel::scaled(model);
    const auto D = build_decoherence_matrix(kern, g);
    const auto num = propagate(rho0, D, {4.0, true}, 3.0, 0.01);
    const auto ana = propagate_analytic_free(rho0, 3.0, kern);
    CHECK(trace_distance(num.rho, ana.rho) <= 1e-4);
  }
}

TEST_CASE("agreement with a dense RK4 Lindblad integration") {
  const Grid1D g{32, 0.75};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::dp), g);
  const auto rho0 = cat_state(g, 4.0, 1.0, 1.0);
  const auto H = oracle::kinetic_matrix(32, 0.75, 1.0);
  const auto ref = oracle::lindblad_rk4(rho0.rho, H, D, 1.0, 2000);
  const auto num = propagate(rho0, D, {1.0, true}, 1.0, 0.001);
  CHECK(oracle::trace_distance(ref, num.rho) < 1e-5);
}

TEST_CASE("coherence profile") {
  const Grid1D g{16, 1.0};
  DensityMatrixGrid s{g, CMatrix::Constant(16, 16, cplx(1.0 / 16, 0)), 1.0};
  const auto prof = coherence_profile(s);
  REQUIRE(prof.size() == 16);
  CHECK(prof[0].first == 0.0);
  CHECK(prof[5].first == 5.0);
  for (auto [d, v] : prof) CHECK(v == doctest::Approx(1.0 / 16));
}

TEST_CASE("invariants over ten thousand steps") {
  const Grid1D g{64, 0.4};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::dp), g);
  auto state = cat_state(g, 5.0, 1.0, 4.0);
  MasterEquationStepper(D, g, {4.0, true}, 1e-3).run(state, 10000);
  CHECK(state.trace_error() < 1e-10);
  CHECK(state.hermiticity_error() < 1e-12);
  CHECK(state.min_eigenvalue() > -1e-10);
}

TEST_CASE("serial and parallel steps are bitwise identical") {
  const Grid1D g{64, 0.4};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::csl), g);
  const auto rho0 = cat_state(g, 5.0, 1.0, 4.0);
  const auto a = propagate(rho0, D, {4.0, true}, 0.5, 0.01, ExecPolicy::serial);
  const auto b = propagate(rho0, D, {4.0, true}, 0.5, 0.01, ExecPolicy::parallel);
  CHECK(a.rho == b.rho);
}

TEST_CASE("step size gate") {
  const Grid1D g{64, 0.4};
  const auto D = build_decoherence_matrix(DecoherenceKernel::scaled(ModelKind::dp), g);
  CHECK_THROWS_AS(MasterEquationStepper(D, g, {1.0, true}, 0.02), StepSizeError);
  CHECK_NOTHROW(MasterEquationStepper(D, g, {1.0, true}, 0.01));
}
