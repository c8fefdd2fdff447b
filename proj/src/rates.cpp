#include "dpcollapse/rates.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;

// Below this |z| erf(z)/z uses a 5-term Taylor series.
constexpr double kErfSeriesSwitch = 1e-4;
// Below this z = x/2 the DP profile is summed as a series to avoid 1 - (1 - eps).
constexpr double kProfileSeriesSwitch = 0.25;

void require_gaussian(const DPParams& dp) {
  if (dp.coarse_graining != CoarseGraining::gaussian)
    throw ParameterError("closed-form rates require Gaussian coarse-graining; "
                         "the sphere coarse-graining is available through damping_function only");
}

}  // namespace

double erf_over_x(double z) {
  const double az = std::abs(z);
  if (az < kErfSeriesSwitch) {
    const double z2 = z * z;
    return (2.0 / kSqrtPi) * (1.0 + z2 * (-1.0 / 3 + z2 * (1.0 / 10 + z2 * (-1.0 / 42 + z2 / 216))));
  }
  return std::erf(z) / z;
}

double dp_profile(double x) {
  x = std::abs(x);
  const double z = 0.5 * x;
  if (z < kProfileSeriesSwitch) {
    // sum_{n>=1} (-1)^(n+1) z^(2n) / (n! (2n+1))
    const double z2 = z * z;
    double term = 1.0, sum = 0.0;
    for (int n = 1; n <= 14; ++n) {
      term *= -z2 / n;
      sum -= term / (2 * n + 1);
    }
    return sum;
  }
  return 1.0 - kSqrtPi * std::erf(z) / x;
}

double csl_profile(double x) { return -std::expm1(-0.25 * x * x); }

double self_energy_U(double delta, double m, double R0, const PhysicalConstants& c) {
  if (!(R0 > 0)) throw ParameterError("R0 must be > 0");
  if (delta < 0) throw ParameterError("separation must be >= 0");
  if (m < 0) throw ParameterError("mass must be >= 0");
  return -c.G * m * m * erf_over_x(delta / (2 * R0)) / (2 * R0);
}

double csl_phi(double delta, double m, const CSLParams& csl) {
  csl.validate();
  const double ratio = m / csl.m0;
  const double lambda = ratio * ratio * csl.gamma / std::pow(4 * kPi * csl.r_c * csl.r_c, 1.5);
  return lambda * std::exp(-delta * delta / (4 * csl.r_c * csl.r_c));
}

double collapse_rate_point(ModelKind model, double m, const ModelParams& params) {
  if (m < 0) throw ParameterError("mass must be >= 0");
  const auto& c = params.constants;
  if (model == ModelKind::dp) {
    params.dp.validate();
    require_gaussian(params.dp);
    return c.G * m * m / (kSqrtPi * c.hbar * params.dp.R0);
  }
  return csl_phi(0.0, m, params.csl);
}

double damping_function(double Q, double R0, CoarseGraining shape, double hbar) {
  const double x = Q * R0 / hbar;
  if (shape == CoarseGraining::gaussian) return std::exp(-x * x);
  if (x < 1e-3) {
    const double x2 = x * x;
    const double g = 1.0 - x2 / 10 + x2 * x2 / 280;
    return g * g;
  }
  const double g = 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
  return g * g;
}

// ---------------------------------------------------------------------------

DecoherenceKernel::DecoherenceKernel(ModelKind model, double length, double rate)
    : model_(model), length_(length), rate_(rate) {
  if (!(length > 0)) throw ParameterError("kernel length must be > 0");
  if (!(rate >= 0)) throw ParameterError("kernel rate must be >= 0");
}

DecoherenceKernel DecoherenceKernel::from_params(ModelKind model, double mass, const ModelParams& params) {
  const double d = model == ModelKind::dp ? params.dp.R0 : params.csl.r_c;
  return {model, d, collapse_rate_point(model, mass, params)};
}

double DecoherenceKernel::evaluate(double delta) const {
  const double x = std::abs(delta) / length_;
  return rate_ * (model_ == ModelKind::dp ? dp_profile(x) : csl_profile(x));
}

double DecoherenceKernel::complement(double delta) const {
  const double x = std::abs(delta) / length_;
  if (model_ == ModelKind::dp) return rate_ * 0.5 * kSqrtPi * erf_over_x(0.5 * x);
  return rate_ * std::exp(-0.25 * x * x);
}

std::optional<double> damping_time(const DecoherenceKernel& kernel, double delta) {
  const double d = kernel.evaluate(delta);
  if (!(d > 0)) return std::nullopt;
  return 1.0 / d;
}

// ---------------------------------------------------------------------------

double form_factor(const RigidBodySpec& body, double Q, double hbar) {
  body.validate();
  if (Q < 0) throw ParameterError("momentum must be >= 0");
  const double y = Q * body.R / hbar;
  if (body.form_factor == FormFactorShape::gaussian_approx) return body.M * std::exp(-0.5 * y * y);
  if (y < 1e-2) {
    const double y2 = y * y;
    return body.M * (1.0 - y2 / 10 + y2 * y2 / 280 - y2 * y2 * y2 / 15120);
  }
  return body.M * 3.0 * (std::sin(y) - y * std::cos(y)) / (y * y * y);
}

double collapse_rate_cm(ModelKind model, const RigidBodySpec& body, const ModelParams& params) {
  body.validate();
  const auto& c = params.constants;
  const double M2 = body.M * body.M;
  if (model == ModelKind::dp) {
    params.dp.validate();
    require_gaussian(params.dp);
    const double R0 = params.dp.R0;
    return c.G * M2 / (c.hbar * std::sqrt(kPi * (body.R * body.R + R0 * R0)));
  }
  params.csl.validate();
  const auto& csl = params.csl;
  const double w2 = body.R * body.R + csl.r_c * csl.r_c;
  return csl.gamma * M2 / (8 * std::pow(kPi, 1.5) * csl.m0 * csl.m0 * std::pow(w2, 1.5));
}

HeatingRate heating_rate(double m, double R0, const PhysicalConstants& c) {
  if (m < 0) throw ParameterError("mass must be >= 0");
  if (!(R0 > 0)) throw ParameterError("R0 must be > 0");
  const double power = m * c.G * c.hbar / (4 * kSqrtPi * R0 * R0 * R0);
  return {power, power / (1.5 * c.kB)};
}

DissipativeCoeffs dissipative_coeffs(double m, const DPParams& dp, const PhysicalConstants& c) {
  if (!(m > 0)) throw ParameterError("mass must be > 0 for the dissipative coefficients");
  dp.validate();
  DissipativeCoeffs out;
  out.k = dp.m_r / m;
  const double onek3 = std::pow(1.0 + out.k, 3);
  const double R0 = dp.R0;
  out.gamma_DP = m * c.G * c.hbar / (4 * kSqrtPi * onek3 * R0 * R0 * R0);
  out.xi_DP = 4 * m * m * c.G * out.k / (3 * kSqrtPi * onek3 * c.hbar * R0);
  if (dp.m_r > 0) {
    out.T = c.hbar * c.hbar / (8 * c.kB * dp.m_r * R0 * R0);
  } else {
    out.T = std::numeric_limits<double>::infinity();
    out.infinite_temperature = true;
  }
  return out;
}

double energy_trajectory(double E0, double t, double gamma, double xi) {
  if (t < 0) throw ParameterError("time must be >= 0");
  if (xi * t < 1e-12) return E0 + (gamma - xi * E0) * t;
  return E0 + (gamma - xi * E0) * (-std::expm1(-xi * t)) / xi;
}

// ---------------------------------------------------------------------------

RateFunction::RateFunction(RateModel model, double mass, const ModelParams& params)
    : model_(model), mass_(mass), params_(params) {
  if (model == RateModel::dp_cm || model == RateModel::csl_cm)
    throw ParameterError("center-of-mass rate functions need a RigidBodySpec");
  if (mass < 0) throw ParameterError("mass must be >= 0");
  params_.validate();
}

RateFunction::RateFunction(RateModel model, const RigidBodySpec& body, const ModelParams& params)
    : model_(model), mass_(body.M), body_(body), params_(params) {
  if (model == RateModel::dp || model == RateModel::csl)
    throw ParameterError("one-particle rate functions take a mass, not a body");
  body.validate();
  params_.validate();
}

double RateFunction::evaluate(double Q) const {
  const auto& c = params_.constants;
  const double hbar = c.hbar;
  switch (model_) {
    case RateModel::dp: {
      const double f = damping_function(Q, params_.dp.R0, params_.dp.coarse_graining, hbar);
      return c.G * mass_ * mass_ / (2 * kPi * kPi * hbar * hbar * Q * Q) * f;
    }
    case RateModel::csl: {
      const double ratio = mass_ / params_.csl.m0;
      const double x = Q * params_.csl.r_c / hbar;
      return params_.csl.gamma / std::pow(2 * kPi * hbar, 3) * ratio * ratio * std::exp(-x * x);
    }
    case RateModel::dp_cm: {
      const double rho = form_factor(body_, Q, hbar);
      const double x = Q * params_.dp.R0 / hbar;
      return c.G / (2 * kPi * kPi * hbar * hbar * Q * Q) * rho * rho * std::exp(-x * x);
    }
    case RateModel::csl_cm: {
      const double rho = form_factor(body_, Q, hbar) / params_.csl.m0;
      const double x = Q * params_.csl.r_c / hbar;
      return params_.csl.gamma / std::pow(2 * kPi * hbar, 3) * rho * rho * std::exp(-x * x);
    }
  }
  return 0.0;
}

double RateFunction::cutoff() const {
  const double hbar = params_.constants.hbar;
  const bool dp = model_ == RateModel::dp || model_ == RateModel::dp_cm;
  const double d = dp ? params_.dp.R0 : params_.csl.r_c;
  const bool cm = model_ == RateModel::dp_cm || model_ == RateModel::csl_cm;
  if (cm && body_.form_factor == FormFactorShape::gaussian_approx)
    return 10 * hbar / std::sqrt(d * d + body_.R * body_.R);
  if (dp && !cm && params_.dp.coarse_graining == CoarseGraining::sphere)
    return 1000 * hbar / d;  // algebraic Q^-6 tail
  return 10 * hbar / d;
}

double RateFunction::closed_form_total() const {
  switch (model_) {
    case RateModel::dp: return collapse_rate_point(ModelKind::dp, mass_, params_);
    case RateModel::csl: return collapse_rate_point(ModelKind::csl, mass_, params_);
    case RateModel::dp_cm: return collapse_rate_cm(ModelKind::dp, body_, params_);
    case RateModel::csl_cm: return collapse_rate_cm(ModelKind::csl, body_, params_);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

std::vector<Figure1Row> figure1_dataset(const ModelParams& params, double m, int points, double x_min,
                                        double x_max, AxisSpacing spacing) {
  if (points < 2) throw ParameterError("figure 1 needs at least 2 points");
  if (!(x_min > 0) || !(x_max > x_min)) throw ParameterError("figure 1 range must satisfy 0 < min < max");
  if (!(m > 0)) throw ParameterError("mass must be > 0");
  const auto dp = DecoherenceKernel::from_params(ModelKind::dp, m, params);
  const auto csl = DecoherenceKernel::from_params(ModelKind::csl, m, params);
  std::vector<Figure1Row> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    double x = spacing == AxisSpacing::log ? x_min * std::pow(x_max / x_min, f)
                                           : x_min + (x_max - x_min) * f;
    if (i == 0) x = x_min;
    if (i == points - 1) x = x_max;
    const auto tau_dp = damping_time(dp, x * dp.length());
    const auto tau_csl = damping_time(csl, x * csl.length());
    const double inf = std::numeric_limits<double>::infinity();
    rows.push_back({x, tau_dp ? *tau_dp * dp.rate() : inf, tau_csl ? *tau_csl * csl.rate() : inf});
  }
  return rows;
}

}  // namespace dpcollapse
