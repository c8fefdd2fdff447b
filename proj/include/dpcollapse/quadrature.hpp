#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "dpcollapse/rates.hpp"
#include "dpcollapse/units.hpp"

namespace dpcollapse::quadrature {

struct Integrand1D {
  std::function<double(double)> evaluate;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  /// Interior points where the integrand is sharp (peaks, kinks); used as panel breaks.
  std::vector<double> singularity_hints{};
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr double kDefaultRelTol = 1e-9;

/// Globally adaptive 15-point Gauss-Kronrod integration.
///
/// A semi-infinite upper limit is mapped onto [0, 1) with Q = a + t/(1-t).
/// Throws OracleFailure (carrying the best estimate) if the relative error
/// target is not met within the subdivision budget.
QuadratureResult integrate_radial(const Integrand1D& f, double rel_tol = kDefaultRelTol,
                                  std::size_t max_subdivisions = 20000);

struct RadialDomain {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> hints{};
};

/// Nested (polar-outer, radial-inner) integral of f(Q, u) over u in [-1, 1].
/// The azimuthal factor 2*pi is NOT included.
QuadratureResult integrate_polar(const std::function<double(double Q, double u)>& f,
                                 const std::function<RadialDomain(double u)>& radial_domain,
                                 std::vector<double> u_hints = {}, double rel_tol = kDefaultRelTol);

/// Integral of Gamma over all of momentum space, 4 pi int Q^2 Gamma(Q) dQ.
QuadratureResult total_rate(const RateFunction& rate, double rel_tol = kDefaultRelTol);

/// int d^3Q exp(i Q.x/hbar) Gamma(Q) at |x| = delta, via the radial sinc kernel.
QuadratureResult fourier_of_rate(const RateFunction& rate, double delta, double rel_tol = kDefaultRelTol);

/// (2 pi / m) int Gamma(Q) Q^4 dQ: the energy injection rate of a translation-covariant generator.
QuadratureResult heating_moment(const RateFunction& rate, double m, double rel_tol = kDefaultRelTol);

/// -G m^2 <1/|x + z|> for z distributed as the difference of two Gaussian-smeared
/// point masses (variance 2 R0^2 per axis), by direct 2D quadrature.
QuadratureResult smeared_self_energy(double delta, double m, double R0, const PhysicalConstants& c = {},
                                     double rel_tol = 1e-11);

/// (1/2m) int d^3Q |L(Q,p)|^2 (Q^2 + 2 p.Q) for a momentum eigenstate p, in J/s.
QuadratureResult dissipative_energy_moment(const std::array<double, 3>& p, double m, const DPParams& dp,
                                           const PhysicalConstants& c = {}, double rel_tol = kDefaultRelTol);

}  // namespace dpcollapse::quadrature
