#include "dpcollapse/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dpcollapse/errors.hpp"

namespace dpcollapse::quadrature {

namespace {

constexpr double kPi = std::numbers::pi;

// QUADPACK 15-point Kronrod extension of the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b, std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double l1 = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[j];
    l1 += (std::abs(f1) + std::abs(f2)) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  evals += 15;
  return {a, b, kron * h, std::abs((kron - gauss) * h), l1 * std::abs(h)};
}

template <class F>
QuadratureResult adaptive(const F& f, std::vector<double> breaks, double rel_tol, std::size_t max_subdivisions) {
  QuadratureResult res;
  std::vector<Panel> heap;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) heap.push_back(gk15(f, breaks[i], breaks[i + 1], res.evaluations));
  }
  std::make_heap(heap.begin(), heap.end());
  auto totals = [&heap](double& v, double& e, double& l1) {
    v = e = l1 = 0.0;
    for (const auto& p : heap) { v += p.value; e += p.error; l1 += p.l1; }
  };
  double value = 0, error = 0, l1 = 0;
  totals(value, error, l1);
  std::size_t splits = 0;
  while (!(error <= std::max(rel_tol * std::abs(value), 1e-3 * rel_tol * l1))) {
    if (!std::isfinite(value) || splits >= max_subdivisions) {
      throw OracleFailure("quadrature did not converge (estimate " + std::to_string(value) + ", error " +
                              std::to_string(error) + ")",
                          value, error);
    }
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw OracleFailure("quadrature panel can no longer be bisected", value, error);
    }
    heap.push_back(gk15(f, worst.a, mid, res.evaluations));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(gk15(f, mid, worst.b, res.evaluations));
    std::push_heap(heap.begin(), heap.end());
    ++splits;
    // Re-summing keeps the totals free of drift from incremental updates.
    totals(value, error, l1);
  }
  res.value = value;
  res.abs_error_estimate = error;
  return res;
}

}  // namespace

QuadratureResult integrate_radial(const Integrand1D& f, double rel_tol, std::size_t max_subdivisions) {
  if (!(rel_tol > 1e-15 && rel_tol < 1e-1)) throw ParameterError("rel_tol out of range");
  if (!f.evaluate) throw ParameterError("integrand has no evaluate function");
  if (!(f.upper > f.lower)) return {};
  std::vector<double> hints;
  for (double h : f.singularity_hints)
    if (h > f.lower && h < f.upper) hints.push_back(h);
  std::sort(hints.begin(), hints.end());

  if (std::isinf(f.upper)) {
    const double a = f.lower;
    auto mapped = [&f, a](double t) {
      if (t >= 1.0) return 0.0;
      const double s = 1.0 - t;
      const double v = f.evaluate(a + t / s);
      return v / (s * s);
    };
    std::vector<double> breaks{0.0};
    for (double h : hints) breaks.push_back((h - a) / (1.0 + h - a));
    breaks.push_back(1.0);
    return adaptive(mapped, breaks, rel_tol, max_subdivisions);
  }
  std::vector<double> breaks{f.lower};
  breaks.insert(breaks.end(), hints.begin(), hints.end());
  breaks.push_back(f.upper);
  return adaptive(f.evaluate, breaks, rel_tol, max_subdivisions);
}

QuadratureResult integrate_polar(const std::function<double(double, double)>& f,
                                 const std::function<RadialDomain(double)>& radial_domain,
                                 std::vector<double> u_hints, double rel_tol) {
  std::size_t inner_evals = 0;
  auto outer = [&](double u) {
    const RadialDomain dom = radial_domain(u);
    Integrand1D g{[&f, u](double Q) { return f(Q, u); }, dom.lower, dom.upper, dom.hints};
    const auto r = integrate_radial(g, 0.1 * rel_tol);
    inner_evals += r.evaluations;
    return r.value;
  };
  std::vector<double> breaks{-1.0};
  std::sort(u_hints.begin(), u_hints.end());
  for (double h : u_hints)
    if (h > -1.0 && h < 1.0) breaks.push_back(h);
  breaks.push_back(1.0);
  auto res = adaptive(outer, breaks, rel_tol, 20000);
  res.evaluations += inner_evals;
  return res;
}

QuadratureResult total_rate(const RateFunction& rate, double rel_tol) {
  Integrand1D f{[&rate](double Q) { return Q > 0 ? 4 * kPi * Q * Q * rate.evaluate(Q) : 0.0; }, 0.0, rate.cutoff()};
  return integrate_radial(f, rel_tol);
}

QuadratureResult fourier_of_rate(const RateFunction& rate, double delta, double rel_tol) {
  if (delta < 0) throw ParameterError("separation must be >= 0");
  const double k = delta / rate.hbar();
  Integrand1D f{[&rate, k](double Q) {
                  if (!(Q > 0)) return 0.0;
                  const double x = Q * k;
                  const double sinc = x < 1e-4 ? 1.0 - x * x / 6 : std::sin(x) / x;
                  return 4 * kPi * Q * Q * rate.evaluate(Q) * sinc;
                },
                0.0, rate.cutoff()};
  // Panel breaks at every ~4 oscillation periods of the sinc kernel.
  if (k > 0) {
    const double period = 2 * kPi / k;
    const double step = 4 * period;
    for (double q = step; q < f.upper && f.singularity_hints.size() < 2000; q += step) f.singularity_hints.push_back(q);
  }
  return integrate_radial(f, rel_tol);
}

QuadratureResult heating_moment(const RateFunction& rate, double m, double rel_tol) {
  if (!(m > 0)) throw ParameterError("mass must be > 0");
  Integrand1D f{[&rate](double Q) { return Q > 0 ? std::pow(Q, 4) * rate.evaluate(Q) : 0.0; }, 0.0, rate.cutoff()};
  auto r = integrate_radial(f, rel_tol);
  r.value *= 2 * kPi / m;
  r.abs_error_estimate *= 2 * kPi / m;
  return r;
}

QuadratureResult smeared_self_energy(double delta, double m, double R0, const PhysicalConstants& c,
                                     double rel_tol) {
  if (!(R0 > 0)) throw ParameterError("R0 must be > 0");
  if (delta < 0) throw ParameterError("separation must be >= 0");
  const double x = delta / R0;
  const double norm = std::pow(4 * kPi, -1.5);
  std::size_t inner_evals = 0;
  // Angular average of 1/|x + z| over directions of z, with u = -1 + w^2.
  auto angular = [&](double s) {
    if (x == 0.0) return 1.0 / s;
    Integrand1D g{[x, s](double w) {
                    const double d = x - s;
                    return w / std::sqrt(d * d + 2 * x * s * w * w);
                  },
                  0.0, std::sqrt(2.0)};
    const double knee = std::abs(x - s) / std::sqrt(2 * x * s);
    if (knee > 0 && knee < std::sqrt(2.0)) g.singularity_hints.push_back(knee);
    const auto r = integrate_radial(g, 0.1 * rel_tol);
    inner_evals += r.evaluations;
    return r.value;
  };
  Integrand1D radial{[&](double s) {
                       if (!(s > 0)) return 0.0;
                       return 4 * kPi * s * s * norm * std::exp(-0.25 * s * s) * angular(s);
                     },
                     0.0, x + 40.0};
  if (x > 0) radial.singularity_hints.push_back(x);
  auto r = integrate_radial(radial, rel_tol);
  const double scale = -c.G * m * m / R0;
  r.value *= scale;
  r.abs_error_estimate *= std::abs(scale);
  r.evaluations += inner_evals;
  return r;
}

QuadratureResult dissipative_energy_moment(const std::array<double, 3>& p, double m, const DPParams& dp,
                                           const PhysicalConstants& c, double rel_tol) {
  if (!(m > 0)) throw ParameterError("mass must be > 0");
  dp.validate();
  const double k = dp.m_r / m;
  const double pmag = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  const double ps = pmag * dp.R0 / c.hbar;  // momentum in units of hbar/R0
  auto f = [k, ps](double Q, double u) {
    const double s = (1 + k) * Q + 2 * k * ps * u;
    return std::exp(-s * s) * (Q * Q + 2 * ps * Q * u);
  };
  auto domain = [k, ps](double u) {
    const double centre = std::max(0.0, -2 * k * ps * u / (1 + k));
    RadialDomain d{0.0, centre + 12.0 / (1 + k), {}};
    if (centre > 0) d.hints.push_back(centre);
    return d;
  };
  auto r = integrate_polar(f, domain, {0.0}, rel_tol);
  const double scale = m * c.G * c.hbar / (2 * kPi * std::pow(dp.R0, 3));
  r.value *= scale;
  r.abs_error_estimate *= std::abs(scale);
  return r;
}

}  // namespace dpcollapse::quadrature
