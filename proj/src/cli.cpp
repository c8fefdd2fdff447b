#include "dpcollapse/cli.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "dpcollapse/config.hpp"
#include "dpcollapse/dissipative.hpp"
#include "dpcollapse/errors.hpp"
#include "dpcollapse/io.hpp"
#include "dpcollapse/master_equation.hpp"
#include "dpcollapse/quadrature.hpp"
#include "dpcollapse/rates.hpp"
#include "dpcollapse/sse.hpp"

namespace dpcollapse::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Options shared by every subcommand. Physical quantities are unit strings.
struct Common {
  std::string config, preset, model, R0, m_r, gamma, r_c, mass, radius, form_factor, coarse_graining;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string policy = "serial";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--preset", c.preset, "diosi | ghirardi | csl_grw | csl_adler");
  app->add_option("--model", c.model, "dp | csl");
  app->add_option("--R0", c.R0, "DP cut-off, e.g. \"1e-15 m\"");
  app->add_option("--m-r", c.m_r, "dissipation reference mass, e.g. \"1e11 amu\"");
  app->add_option("--gamma", c.gamma, "CSL strength, e.g. \"1e-36 m^3/s\"");
  app->add_option("--r-c", c.r_c, "CSL correlation length, e.g. \"1e-7 m\"");
  app->add_option("--mass", c.mass, "particle or body mass, e.g. \"1 amu\"");
  app->add_option("--radius", c.radius, "rigid body radius, e.g. \"50 nm\"");
  app->add_option("--form-factor", c.form_factor, "gaussian_approx | sphere_exact");
  app->add_option("--coarse-graining", c.coarse_graining, "gaussian | sphere");
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--out", c.out, "output directory (default: $DPC_OUT_DIR or the working directory)");
  app->add_option("--policy", c.policy, "serial | parallel");
}

RunConfig resolve(const Common& c) {
  Json j = Json::object();
  if (!c.config.empty()) {
    try {
      j = Json::parse(io::read_file(c.config));
    } catch (const Json::parse_error& e) {
      throw ConfigError(c.config + ": invalid JSON: " + e.what());
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  }
  auto set = [&j](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  set("preset", c.preset);
  set("model", c.model);
  set("R0", c.R0);
  set("m_r", c.m_r);
  set("gamma", c.gamma);
  set("r_c", c.r_c);
  set("mass", c.mass);
  set("radius", c.radius);
  set("form_factor", c.form_factor);
  set("coarse_graining", c.coarse_graining);
  if (c.seed) j["seed"] = *c.seed;
  if (!c.preset.empty() && c.model.empty() && !j.contains("model")) {
    // an explicit preset selects its own model
    j["model"] = std::string(to_string(preset(c.preset).kind));
  }
  return parse_config_json(j);
}

/// Value of a run-section key if the flag was not given on the command line.
template <class T>
void from_run(const RunConfig& cfg, const CLI::App* app, const char* flag, const char* key, T& target) {
  if (app->count(flag) == 0 && cfg.run.contains(key)) target = cfg.run.at(key).get<T>();
}

Json options_json(const CLI::App* app) {
  Json j = Json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& r = opt->results();
    j[opt->get_name()] = r.size() == 1 ? Json(r.front()) : Json(r);
  }
  return j;
}

/// Exit code raised by a handler that completed but produced inconclusive statistics.
struct Outcome {
  int exit_code = 0;
};

using Handler = std::function<Outcome(const RunConfig&, io::Emitter&, ExecPolicy)>;

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------------------
// rates

Json rates_for(const RunConfig& cfg) {
  const auto& p = cfg.params;
  Json j;
  auto closed = [&](ModelKind model, double m) -> Json {
    try {
      return collapse_rate_point(model, m, p);
    } catch (const ParameterError&) {
      return nullptr;  // sphere coarse-graining: quadrature only
    }
  };
  if (cfg.radius) {
    const RigidBodySpec body{cfg.mass.value_or(0.0), *cfg.radius, cfg.form_factor};
    const double dp = quadrature::total_rate(RateFunction(RateModel::dp_cm, body, p)).value;
    const double csl = quadrature::total_rate(RateFunction(RateModel::csl_cm, body, p)).value;
    j = {{"M_kg", body.M}, {"R_m", body.R}, {"lambda_dp_quadrature", dp}, {"lambda_csl_quadrature", csl},
         {"form_factor", body.form_factor == FormFactorShape::gaussian_approx ? "gaussian_approx" : "sphere_exact"}};
    if (body.form_factor == FormFactorShape::gaussian_approx) {
      j["lambda_dp"] = collapse_rate_cm(ModelKind::dp, body, p);
      j["lambda_csl"] = collapse_rate_cm(ModelKind::csl, body, p);
    } else {
      j["lambda_dp"] = dp;
      j["lambda_csl"] = csl;
    }
  } else {
    const double m = cfg.mass.value_or(0.0);
    const double dp = quadrature::total_rate(RateFunction(RateModel::dp, m, p)).value;
    const double csl = quadrature::total_rate(RateFunction(RateModel::csl, m, p)).value;
    const Json dp_closed = closed(ModelKind::dp, m);
    j = {{"mass_kg", m},
         {"lambda_dp", dp_closed.is_null() ? Json(dp) : dp_closed},
         {"lambda_csl", collapse_rate_point(ModelKind::csl, m, p)},
         {"lambda_dp_quadrature", dp},
         {"lambda_csl_quadrature", csl}};
  }
  j["model"] = std::string(to_string(p.kind));
  j["lambda"] = p.kind == ModelKind::dp ? j["lambda_dp"] : j["lambda_csl"];
  return j;
}

Outcome cmd_rates(const RunConfig& cfg, io::Emitter& out, ExecPolicy) {
  if (!cfg.mass) throw ConfigError("mass: required (e.g. --mass \"1 amu\")");
  out.emit(rates_for(cfg), "rates.json");
  return {};
}

// ---------------------------------------------------------------------------
// fig1

struct Fig1Options {
  int points = 200;
  double x_min = 0.05, x_max = 50.0;
  std::string spacing = "log";
};

Outcome cmd_fig1(const RunConfig& cfg, io::Emitter& out, const Fig1Options& o) {
  const double m = cfg.mass.value_or(cfg.params.constants.amu);
  AxisSpacing sp;
  if (o.spacing == "log") sp = AxisSpacing::log;
  else if (o.spacing == "linear") sp = AxisSpacing::linear;
  else throw ConfigError("spacing: expected log or linear");
  const auto rows = figure1_dataset(cfg.params, m, o.points, o.x_min, o.x_max, sp);
  io::Table t{{"delta_over_d", "tau_lambda_dp", "tau_lambda_csl"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.x, r.dp, r.csl});
  out.emit(t, "fig1.csv");
  return {};
}

// ---------------------------------------------------------------------------
// heating / dissipative

Json heating_for(const RunConfig& cfg) {
  const double m = cfg.mass.value_or(kProtonMass);
  const auto h = heating_rate(m, cfg.params.dp.R0, cfg.params.constants);
  return {{"mass_kg", m}, {"R0_m", cfg.params.dp.R0}, {"power_W", h.power}, {"temperature_rate_K_per_s", h.temperature_rate}};
}

Json dissipative_for(const RunConfig& cfg, std::optional<double> target_T) {
  const auto& c = cfg.params.constants;
  const double m = cfg.mass.value_or(kProtonMass);
  const auto d = dissipative_coeffs(m, cfg.params.dp, c);
  Json j = {{"mass_kg", m},
            {"R0_m", cfg.params.dp.R0},
            {"m_r_kg", cfg.params.dp.m_r},
            {"gamma_DP_W", d.gamma_DP},
            {"xi_DP_per_s", d.xi_DP},
            {"T_K", number_or_null(d.T)},
            {"k", d.k},
            {"infinite_temperature", d.infinite_temperature},
            {"T_times_m_r_amu_R0_sq", number_or_null(d.T * cfg.params.dp.m_r / c.amu * std::pow(cfg.params.dp.R0, 2))}};
  if (target_T) {
    if (!(*target_T > 0)) throw ParameterError("target-T: must be > 0");
    const double mr = c.hbar * c.hbar / (8 * c.kB * *target_T * std::pow(cfg.params.dp.R0, 2));
    j["target_T_K"] = *target_T;
    j["m_r_for_target_T_amu"] = mr / c.amu;
  }
  return j;
}

// ---------------------------------------------------------------------------
// decohere

struct DecohereOptions {
  int n_sites = 64;
  double grid_spacing = 0.4;
  double t_final = 3.0;
  double dt = 0.01;
  double separation = 5.0;
  double packet_width = 1.0;
  double scaled_mass = 4.0;
  int snapshots = 10;
  bool no_kinetic = false;
};

Outcome cmd_decohere(const RunConfig& cfg, io::Emitter& out, ExecPolicy policy, const DecohereOptions& o) {
  if (o.snapshots < 1) throw ConfigError("snapshots: must be >= 1");
  const Grid1D g{o.n_sites, o.grid_spacing, -0.5 * o.n_sites * o.grid_spacing};
  const auto kernel = DecoherenceKernel::scaled(cfg.params.kind);
  const auto D = build_decoherence_matrix(kernel, g);
  const KineticOperator kin{o.scaled_mass, !o.no_kinetic};
  const CVector psi = gaussian_packet(g, -0.5 * o.separation, o.packet_width) +
                      gaussian_packet(g, 0.5 * o.separation, o.packet_width);
  DensityMatrixGrid state = pure_state(g, psi, o.scaled_mass);
  const DensityMatrixGrid rho0 = state;

  io::Table prof{{"t", "delta", "mean_abs_rho"}, {}};
  auto record = [&](double t) {
    for (const auto& [d, v] : coherence_profile(state)) prof.rows.push_back({t, d, v});
  };
  record(0.0);
  const double chunk = o.t_final / o.snapshots;
  for (int s = 1; s <= o.snapshots; ++s) {
    state = propagate(state, D, kin, chunk, o.dt, policy);
    record(s * chunk);
  }
  io::Table rho{{"x_i", "x_j", "re", "im"}, {}};
  for (int i = 0; i < g.n_sites; ++i)
    for (int j = 0; j < g.n_sites; ++j) rho.rows.push_back({g.x(i), g.x(j), state.rho(i, j).real(), state.rho(i, j).imag()});

  Json summary = {{"model", std::string(to_string(cfg.params.kind))},
                  {"n_sites", o.n_sites},
                  {"grid_spacing", o.grid_spacing},
                  {"t_final", o.t_final},
                  {"trace_error", state.trace_error()},
                  {"hermiticity_error", state.hermiticity_error()},
                  {"min_eigenvalue", state.min_eigenvalue()}};
  if (!o.no_kinetic) {
    const auto exact = propagate_analytic_free(rho0, o.t_final, kernel);
    summary["trace_distance_to_analytic"] = trace_distance(state.rho, exact.rho);
  }
  out.emit(prof, "coherence.csv");
  out.emit(rho, "rho_final.csv");
  out.emit(summary, "decohere.json");
  return {};
}

// ---------------------------------------------------------------------------
// unravel

struct UnravelOptions {
  int n_sites = 16;
  double grid_spacing = 0.5;
  double t_final = 3.0;
  double dt = 1e-3;
  std::size_t n_traj = 2000;
  std::optional<double> weight;
  double scaled_mass = 4.0;
  bool kinetic = false;
};

Outcome cmd_unravel(const RunConfig& cfg, io::Emitter& out, ExecPolicy policy, const UnravelOptions& o) {
  const Grid1D g{o.n_sites, o.grid_spacing, -0.5 * o.n_sites * o.grid_spacing};
  const auto kernel = DecoherenceKernel::scaled(cfg.params.kind);
  const auto noise = build_noise_covariance(kernel, g);
  const KineticOperator kin{o.scaled_mass, o.kinetic};
  const int left = o.n_sites / 4 - 1, right = o.n_sites - o.n_sites / 4;
  const double w = o.weight.value_or(0.5);
  if (!(w >= 0 && w <= 1)) throw ConfigError("weight: must lie in [0, 1]");
  CVector psi = CVector::Zero(o.n_sites);
  psi[left] = std::sqrt(w);
  psi[right] = std::sqrt(1 - w);
  const WaveFunctionLattice psi0{g, psi, o.scaled_mass};
  const SseRunOptions opt{o.t_final, o.dt, o.n_traj, cfg.seed, policy};

  if (o.weight) {
    const auto cs = collapse_statistics(psi0, o.n_sites / 2, noise, kin, opt);
    out.emit(Json{{"n_traj", cs.n_traj},
                  {"n_left", cs.n_left},
                  {"n_right", cs.n_right},
                  {"n_unresolved", cs.n_unresolved},
                  {"weight_left", cs.weight_left},
                  {"freq_left", cs.freq_left},
                  {"freq_right", cs.freq_right},
                  {"wilson_left", {cs.ci_left.lower, cs.ci_left.upper}},
                  {"wilson_right", {cs.ci_right.lower, cs.ci_right.upper}},
                  {"std_error", cs.std_error},
                  {"chi_square", cs.chi_square},
                  {"p_value", cs.p_value},
                  {"inconclusive", cs.inconclusive}},
             "collapse.json");
    return {cs.inconclusive ? static_cast<int>(ExitCode::inconclusive) : 0};
  }
  const auto res = run_ensemble(psi0, noise, kin, opt);
  const auto D = build_decoherence_matrix(kernel, g, false);
  const auto ref = propagate(pure_state(g, psi, o.scaled_mass), D, kin, o.t_final, o.dt, policy);
  Json stats = Json::array();
  for (const auto& s : res.statistics) stats.push_back({{"name", s.name}, {"mean", s.mean}, {"std_error", s.std_error}});
  out.emit(Json{{"n_traj", res.n_traj},
                {"seed", res.seed},
                {"statistics", stats},
                {"trace_distance_to_lindblad", trace_distance(res.mean_rho.rho, ref.rho)},
                {"bound_5_over_sqrt_n", 5.0 / std::sqrt(static_cast<double>(res.n_traj))}},
           "unravel.json");
  io::Table rho{{"x_i", "x_j", "re", "im"}, {}};
  for (int i = 0; i < g.n_sites; ++i)
    for (int j = 0; j < g.n_sites; ++j)
      rho.rows.push_back({g.x(i), g.x(j), res.mean_rho.rho(i, j).real(), res.mean_rho.rho(i, j).imag()});
  out.emit(rho, "mean_rho.csv");
  return {};
}

// ---------------------------------------------------------------------------
// relax

struct RelaxOptions {
  double scaled_mass = 1.0;
  double k = 1.0;
  std::size_t particles = 10000;
  double hot_factor = 4.0;
  std::optional<double> t_final;
  int checkpoints = 32;
  int bins = 40;
};

Outcome cmd_relax(const RunConfig& cfg, io::Emitter& out, ExecPolicy policy, const RelaxOptions& o) {
  const DissipativeKernel kernel(o.scaled_mass, o.k);
  const auto sp = scaled_params(kernel);
  double t_final;
  if (o.t_final) t_final = *o.t_final;
  else if (sp.xi_DP > 0) t_final = 10.0 / sp.xi_DP;
  else throw ConfigError("t-final: required when k = 0 (no relaxation time scale)");
  const double T0 = std::isfinite(sp.T) ? o.hot_factor * sp.T : 1.0;
  const auto ens = maxwell_ensemble(o.particles, kernel.m, T0, cfg.seed);
  const KickSampler sampler(kernel);
  const auto cps = log_checkpoints(t_final, o.checkpoints);
  const auto res = evolve_ensemble(ens, sampler, t_final, cfg.seed + 1, cps, policy);

  const double E0 = res.series.mean_energy.front();
  io::Table energy{{"t", "mean_energy", "std_error", "closed_form"}, {}};
  for (std::size_t c = 0; c < cps.size(); ++c)
    energy.rows.push_back({cps[c], res.series.mean_energy[c], res.series.std_error[c],
                           energy_trajectory(E0, cps[c], sp.gamma_DP, sp.xi_DP)});
  out.emit(energy, "energy.csv");

  std::vector<double> speeds;
  for (const auto& p : res.final.momenta) speeds.push_back(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  const double vmax = speeds.empty() ? 1.0 : *std::max_element(speeds.begin(), speeds.end());
  io::Table hist{{"speed_lo", "speed_hi", "count"}, {}};
  std::vector<double> counts(o.bins, 0.0);
  for (double v : speeds) counts[std::min(o.bins - 1, static_cast<int>(v / vmax * o.bins))] += 1;
  for (int b = 0; b < o.bins; ++b) hist.rows.push_back({vmax * b / o.bins, vmax * (b + 1) / o.bins, counts[b]});
  out.emit(hist, "speeds.csv");

  Json summary = {{"scaled_mass", kernel.m}, {"k", kernel.k}, {"gamma_DP", sp.gamma_DP}, {"xi_DP", sp.xi_DP},
                  {"T", number_or_null(sp.T)}, {"t_final", t_final}, {"particles", o.particles}};
  if (std::isfinite(sp.T)) {
    const auto th = thermalization_test(res.final, kernel, sp.T);
    summary["T_estimate"] = th.T_estimate;
    summary["T_std_error"] = th.T_std_error;
    summary["ks_statistic"] = th.ks_statistic;
    summary["ks_p_value"] = th.ks_p_value;
  }
  out.emit(summary, "relax.json");
  return {};
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string axis;
  std::string values;
  std::string log_range;
  std::string target = "rates";
  std::optional<double> target_T;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

Dimension axis_dimension(const std::string& axis) {
  if (axis == "R0" || axis == "radius" || axis == "r_c") return Dimension::length;
  if (axis == "m_r" || axis == "mass") return Dimension::mass;
  if (axis == "gamma") return Dimension::diffusion_strength;
  throw ConfigError("axis: expected R0, m_r, mass, radius, gamma or r_c");
}

void set_axis(RunConfig& cfg, const std::string& axis, double v) {
  if (axis == "R0") cfg.params.dp.R0 = v;
  else if (axis == "m_r") cfg.params.dp.m_r = v;
  else if (axis == "mass") cfg.mass = v;
  else if (axis == "radius") cfg.radius = v;
  else if (axis == "gamma") cfg.params.csl.gamma = v;
  else if (axis == "r_c") cfg.params.csl.r_c = v;
  cfg.params.validate();
}

Outcome cmd_sweep(const RunConfig& cfg, io::Emitter& out, ExecPolicy policy, const SweepOptions& o) {
  const Dimension dim = axis_dimension(o.axis);
  const auto& c = cfg.params.constants;
  std::vector<double> values;
  if (!o.values.empty() == !o.log_range.empty()) throw ConfigError("sweep: give exactly one of --values or --log-range");
  if (!o.values.empty()) {
    for (const auto& v : split(o.values, ',')) values.push_back(parse_quantity(v, dim, "values", c));
  } else {
    const auto parts = split(o.log_range, ':');
    if (parts.size() != 3) throw ConfigError("log-range: expected \"start:stop:count\"");
    const double a = parse_quantity(parts[0], dim, "log-range", c);
    const double b = parse_quantity(parts[1], dim, "log-range", c);
    const long n = std::stol(parts[2]);
    if (n < 2 || n > 100000) throw ConfigError("log-range: count must lie in [2, 1e5]");
    if (!(a > 0) || !(b > 0)) throw ConfigError("log-range: endpoints must be > 0");
    for (long i = 0; i < n; ++i) values.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
  }
  if (values.size() > 100000) throw ConfigError("values: at most 1e5 sweep points");
  for (double v : values)
    if (!std::isfinite(v) || !(v > 0)) throw ConfigError("values: sweep values must be finite and > 0");

  std::vector<std::string> columns;
  std::function<std::vector<double>(const RunConfig&)> eval;
  if (o.target == "rates") {
    columns = {"lambda_dp", "lambda_csl"};
    eval = [](const RunConfig& r) {
      const Json j = rates_for(r);
      return std::vector<double>{j["lambda_dp"].get<double>(), j["lambda_csl"].get<double>()};
    };
  } else if (o.target == "heating") {
    columns = {"power_W", "temperature_rate_K_per_s"};
    eval = [](const RunConfig& r) {
      const Json j = heating_for(r);
      return std::vector<double>{j["power_W"].get<double>(), j["temperature_rate_K_per_s"].get<double>()};
    };
  } else if (o.target == "dissipative") {
    columns = {"gamma_DP_W", "xi_DP_per_s", "T_K", "k"};
    eval = [](const RunConfig& r) {
      const auto d = dissipative_coeffs(r.mass.value_or(kProtonMass), r.params.dp, r.params.constants);
      return std::vector<double>{d.gamma_DP, d.xi_DP, d.T, d.k};
    };
  } else {
    throw ConfigError("target: expected rates, heating or dissipative");
  }

  std::vector<std::vector<double>> rows(values.size());
  std::vector<std::string> errors(values.size());
  for_each_index(policy, values.size(), [&](std::size_t i) {
    try {
      RunConfig r = cfg;
      set_axis(r, o.axis, values[i]);
      rows[i] = {values[i]};
      for (double x : eval(r)) rows[i].push_back(x);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!errors[i].empty()) throw ParameterError("sweep point " + std::to_string(i) + ": " + errors[i]);

  io::Table t;
  t.header = {o.axis + "_si"};
  t.header.insert(t.header.end(), columns.begin(), columns.end());
  t.rows = std::move(rows);
  out.emit(t, "sweep.csv");
  return {};
}

// ---------------------------------------------------------------------------

int report(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << "\n";
  return code;
}

int replay(const std::string& manifest_path, const std::string& out_dir) {
  const auto manifest = io::RunManifest::from_json(Json::parse(io::read_file(manifest_path)));
  std::vector<std::string> args;
  for (std::size_t i = 0; i < manifest.argv.size(); ++i) {
    if (manifest.argv[i] == "--out") {
      ++i;
      continue;
    }
    if (manifest.argv[i].rfind("--out=", 0) == 0) continue;
    args.push_back(manifest.argv[i]);
  }
  const fs::path dir = out_dir.empty() ? fs::path(manifest_path).parent_path() / "replay" : fs::path(out_dir);
  args.push_back("--out");
  args.push_back(dir.string());
  const int code = run(args);
  if (code != manifest.exit_code) {
    std::cerr << "replay: exit code " << code << " differs from recorded " << manifest.exit_code << "\n";
    return static_cast<int>(ExitCode::numerical);
  }
  int mismatches = 0;
  for (const auto& o : manifest.outputs) {
    const fs::path p = dir / o.path;
    const std::string digest = fs::exists(p) ? io::sha256_hex(io::read_file(p)) : std::string("missing");
    const bool ok = digest == o.sha256;
    std::cout << (ok ? "match    " : "MISMATCH ") << o.path << "\n";
    if (!ok) ++mismatches;
  }
  return mismatches ? static_cast<int>(ExitCode::numerical) : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Collapse-model rates, master-equation and unraveling tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DPC_VERSION);

  Common common;
  std::map<std::string, Handler> handlers;

  auto* rates = app.add_subcommand("rates", "collapse rates of a particle or rigid body");
  add_common(rates, common);
  handlers["rates"] = [](const RunConfig& cfg, io::Emitter& out, ExecPolicy p) { return cmd_rates(cfg, out, p); };

  Fig1Options f1;
  auto* fig1 = app.add_subcommand("fig1", "damping time versus distance for DP and CSL");
  add_common(fig1, common);
  fig1->add_option("--points", f1.points, "number of rows")->capture_default_str();
  fig1->add_option("--x-min", f1.x_min, "smallest delta/d")->capture_default_str();
  fig1->add_option("--x-max", f1.x_max, "largest delta/d")->capture_default_str();
  fig1->add_option("--spacing", f1.spacing, "log | linear")->capture_default_str();
  handlers["fig1"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy) {
    from_run(cfg, fig1, "--points", "points", f1.points);
    from_run(cfg, fig1, "--x-min", "x_min", f1.x_min);
    from_run(cfg, fig1, "--x-max", "x_max", f1.x_max);
    from_run(cfg, fig1, "--spacing", "spacing", f1.spacing);
    return cmd_fig1(cfg, out, f1);
  };

  auto* heating = app.add_subcommand("heating", "energy injection rate of the non-dissipative model");
  add_common(heating, common);
  handlers["heating"] = [](const RunConfig& cfg, io::Emitter& out, ExecPolicy) {
    out.emit(heating_for(cfg), "heating.json");
    return Outcome{};
  };

  std::optional<double> target_T;
  auto* diss = app.add_subcommand("dissipative", "coefficients of the dissipative model");
  add_common(diss, common);
  diss->add_option("--target-T", target_T, "solve for the m_r giving this temperature (K)");
  handlers["dissipative"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy) {
    out.emit(dissipative_for(cfg, target_T), "dissipative.json");
    return Outcome{};
  };

  DecohereOptions dec;
  auto* decohere = app.add_subcommand("decohere", "master-equation propagation on a lattice (scaled units)");
  add_common(decohere, common);
  decohere->add_option("--n-sites", dec.n_sites)->capture_default_str();
  decohere->add_option("--grid-spacing", dec.grid_spacing)->capture_default_str();
  decohere->add_option("--t-final", dec.t_final)->capture_default_str();
  decohere->add_option("--dt", dec.dt)->capture_default_str();
  decohere->add_option("--separation", dec.separation, "distance between the two packets")->capture_default_str();
  decohere->add_option("--packet-width", dec.packet_width)->capture_default_str();
  decohere->add_option("--scaled-mass", dec.scaled_mass)->capture_default_str();
  decohere->add_option("--snapshots", dec.snapshots)->capture_default_str();
  decohere->add_flag("--no-kinetic", dec.no_kinetic, "pure decoherence");
  handlers["decohere"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy p) {
    from_run(cfg, decohere, "--n-sites", "n_sites", dec.n_sites);
    from_run(cfg, decohere, "--grid-spacing", "grid_spacing", dec.grid_spacing);
    from_run(cfg, decohere, "--t-final", "t_final", dec.t_final);
    from_run(cfg, decohere, "--dt", "dt", dec.dt);
    from_run(cfg, decohere, "--separation", "separation", dec.separation);
    from_run(cfg, decohere, "--scaled-mass", "scaled_mass", dec.scaled_mass);
    return cmd_decohere(cfg, out, p, dec);
  };

  UnravelOptions unr;
  auto* unravel = app.add_subcommand("unravel", "stochastic Schroedinger ensemble or collapse statistics");
  add_common(unravel, common);
  unravel->add_option("--n-sites", unr.n_sites)->capture_default_str();
  unravel->add_option("--grid-spacing", unr.grid_spacing)->capture_default_str();
  unravel->add_option("--t-final", unr.t_final)->capture_default_str();
  unravel->add_option("--dt", unr.dt)->capture_default_str();
  unravel->add_option("--n-traj", unr.n_traj)->capture_default_str();
  unravel->add_option("--weight", unr.weight, "left weight |a|^2; switches to collapse statistics");
  unravel->add_option("--scaled-mass", unr.scaled_mass)->capture_default_str();
  unravel->add_flag("--kinetic", unr.kinetic, "include the free Hamiltonian");
  handlers["unravel"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy p) {
    from_run(cfg, unravel, "--n-sites", "n_sites", unr.n_sites);
    from_run(cfg, unravel, "--grid-spacing", "grid_spacing", unr.grid_spacing);
    from_run(cfg, unravel, "--t-final", "t_final", unr.t_final);
    from_run(cfg, unravel, "--dt", "dt", unr.dt);
    from_run(cfg, unravel, "--n-traj", "n_traj", unr.n_traj);
    from_run(cfg, unravel, "--scaled-mass", "scaled_mass", unr.scaled_mass);
    if (unravel->count("--weight") == 0 && cfg.run.contains("weight")) unr.weight = cfg.run.at("weight").get<double>();
    return cmd_unravel(cfg, out, p, unr);
  };

  RelaxOptions rel;
  auto* relax = app.add_subcommand("relax", "dissipative momentum jump process and thermalization");
  add_common(relax, common);
  relax->add_option("--scaled-mass", rel.scaled_mass)->capture_default_str();
  relax->add_option("--k", rel.k, "m_r / m")->capture_default_str();
  relax->add_option("--particles", rel.particles)->capture_default_str();
  relax->add_option("--hot-factor", rel.hot_factor, "initial temperature in units of T")->capture_default_str();
  relax->add_option("--t-final", rel.t_final, "default 10 / xi");
  relax->add_option("--checkpoints", rel.checkpoints)->capture_default_str();
  handlers["relax"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy p) {
    from_run(cfg, relax, "--scaled-mass", "scaled_mass", rel.scaled_mass);
    from_run(cfg, relax, "--k", "k", rel.k);
    from_run(cfg, relax, "--particles", "particles", rel.particles);
    if (relax->count("--t-final") == 0 && cfg.run.contains("t_final")) rel.t_final = cfg.run.at("t_final").get<double>();
    return cmd_relax(cfg, out, p, rel);
  };

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "evaluate a target over a parameter axis");
  add_common(sweep, common);
  sweep->add_option("--axis", sw.axis, "R0 | m_r | mass | radius | gamma | r_c")->required();
  sweep->add_option("--values", sw.values, "comma-separated unit strings");
  sweep->add_option("--log-range", sw.log_range, "\"start:stop:count\" with unit strings");
  sweep->add_option("--target", sw.target, "rates | heating | dissipative")->capture_default_str();
  handlers["sweep"] = [&](const RunConfig& cfg, io::Emitter& out, ExecPolicy p) { return cmd_sweep(cfg, out, p, sw); };

  std::string manifest_path, replay_out;
  auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  rep->add_option("--manifest", manifest_path)->required();
  rep->add_option("--out", replay_out, "output directory for the replay");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::configuration);
  }

  try {
    if (rep->parsed()) return replay(manifest_path, replay_out);
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const RunConfig cfg = resolve(common);
    const ExecPolicy policy = parse_exec_policy(common.policy);
    io::Emitter out(common.out.empty() ? io::default_output_dir() : fs::path(common.out));
    const Outcome res = handlers.at(name)(cfg, out, policy);

    io::RunManifest m;
    m.command = name;
    m.argv = args;
    m.parameters = config_to_json(cfg);
    m.parameters["options"] = options_json(sub);
    m.seed = cfg.seed;
    m.tool_version = DPC_VERSION;
    m.exit_code = res.exit_code;
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.write_manifest(m, name + ".manifest.json");
    return res.exit_code;
  } catch (const Error& e) {
    return report(e, static_cast<int>(e.exit_code()));
  } catch (const Json::exception& e) {
    return report(e, static_cast<int>(ExitCode::configuration));
  } catch (const std::invalid_argument& e) {
    return report(e, static_cast<int>(ExitCode::configuration));
  } catch (const std::out_of_range& e) {
    return report(e, static_cast<int>(ExitCode::configuration));
  }
}

int main_entry(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace dpcollapse::cli
