// Independent reference computations for the test suite. Nothing here calls
// into the library's numerics.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr double pi = std::numbers::pi;

// CODATA 2018, duplicated on purpose.
constexpr double G = 6.67430e-11;
constexpr double hbar = 1.054571817e-34;
constexpr double kB = 1.380649e-23;
constexpr double amu = 1.66053906660e-27;
constexpr double proton = 1.67262192369e-27;

/// Recursive adaptive Simpson with Richardson correction.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 60) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole, double eps, int d) {
        const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6 * (fa + 4 * flm + fm);
        const double right = (b - m) / 6 * (fm + 4 * frm + fb);
        const double diff = left + right - whole;
        // the relative floor stops the recursion once it is only resolving rounding noise
        if (d <= 0 || std::abs(diff) <= 15 * eps || std::abs(diff) <= 1e-15 * std::abs(left + right))
          return left + right + diff / 15;
        return rec(a, m, fa, flm, fm, left, eps / 2, d - 1) + rec(m, b, fm, frm, fb, right, eps / 2, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, depth);
}

/// Simpson over consecutive breakpoints.
inline double simpson_pieces(const std::function<double(double)>& f, const std::vector<double>& breaks, double tol) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += simpson(f, breaks[i], breaks[i + 1], tol);
  return s;
}

// ---------------------------------------------------------------------------
// SI closed forms, written from the definitions.

/// int d^3Q G m^2 / (2 pi^2 hbar^2 Q^2) exp(-Q^2 R0^2 / hbar^2), done in x = Q R0 / hbar.
inline double lambda_dp_by_integration(double m, double R0) {
  const double pref = G * m * m / (2 * pi * pi * hbar * hbar) * 4 * pi * hbar / R0;
  return pref * simpson([](double x) { return std::exp(-x * x); }, 0.0, 12.0, 1e-15);
}

inline double lambda_csl(double m, double gamma, double r_c, double m0) {
  return (m / m0) * (m / m0) * gamma / std::pow(4 * pi * r_c * r_c, 1.5);
}

/// Self-energy of two Gaussian mass densities (width R0 each) at separation d.
inline double self_energy(double d, double m, double R0) {
  if (d == 0) return -G * m * m / (std::sqrt(pi) * R0);
  return -G * m * m / d * std::erf(d / (2 * R0));
}

// ---------------------------------------------------------------------------
// Dense lattice Lindblad reference, classical RK4 on the full matrix.

using CMatrix = Eigen::MatrixXcd;

/// Dense lattice kinetic Hamiltonian p^2/2m built from the discrete Fourier basis.
inline CMatrix kinetic_matrix(int n, double h, double m) {
  CMatrix H = CMatrix::Zero(n, n);
  const double L = n * h;
  for (int k = 0; k < n; ++k) {
    const int ks = k < n / 2 ? k : k - n;
    const double p = 2 * pi * ks / L;
    const double e = p * p / (2 * m);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) H(a, b) += e * std::polar(1.0, p * (a - b) * h) / double(n);
  }
  return H;
}

inline CMatrix lindblad_rk4(CMatrix rho, const CMatrix& H, const Eigen::MatrixXd& D, double t, int steps) {
  const std::complex<double> I(0, 1);
  auto rhs = [&](const CMatrix& r) -> CMatrix {
    CMatrix out = -I * (H * r - r * H);
    out.array() -= D.array().cast<std::complex<double>>() * r.array();
    return out;
  };
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + 0.5 * dt * k1);
    const CMatrix k3 = rhs(rho + 0.5 * dt * k2);
    const CMatrix k4 = rhs(rho + dt * k3);
    rho += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return rho;
}

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Dissipative kick density in scaled units (hbar = R0 = 1, Lambda(k=0) = m^2).

inline double kick_density(double m, double k, double Q, double u, double p) {
  const double s = (1 + k) * Q + 2 * k * p * u;
  return m * m / std::sqrt(pi) * std::exp(-s * s);
}

}  // namespace oracle
