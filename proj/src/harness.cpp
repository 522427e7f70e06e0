#include "riccilab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "riccilab/errors.hpp"
#include "riccilab/ricci_flow.hpp"

#ifndef RICCILAB_VERSION
#define RICCILAB_VERSION "0.0.0"
#endif

namespace riccilab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kAdmissibilityMargin = 1e-12;
constexpr double kLambda0Slack = 1e-8;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, key + ": " + what);
}

double parse_real(const std::string& key, const std::string& value) {
  std::string text = value;
  double factor = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    text.erase(text.size() - 2);
    if (!text.empty() && text.back() == '*') text.pop_back();
    if (text.empty()) return factor;
  }
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) config_error(key, "expected a number, got '" + value + "'");
  return x * factor;
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long x = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end) config_error(key, "expected an integer, got '" + value + "'");
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) config_error(key, "empty list entry");
    out.push_back(parse_real(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  config_error(key, "expected true or false");
}

std::vector<double> phi0_field(const BackendSpec& spec) {
  const ConformalTorus grid{spec.N, spec.L};
  const double wave = 2.0 * std::numbers::pi * spec.phi0_mode / spec.L;
  const double h = grid.spacing();
  std::vector<double> phi(grid.nodes());
  for (int j = 0; j < spec.N; ++j) {
    for (int i = 0; i < spec.N; ++i) {
      const double x = i * h, y = j * h;
      double value = 0.0;
      if (spec.phi0 == "constant") {
        value = spec.phi0_amplitude;
      } else if (spec.phi0 == "sin_x") {
        value = spec.phi0_amplitude * std::sin(wave * x);
      } else if (spec.phi0 == "sin_xy") {
        value = spec.phi0_amplitude * std::sin(wave * x) * std::sin(wave * y);
      } else if (spec.phi0 == "cos_sum") {
        value = spec.phi0_amplitude * (std::cos(wave * x) + std::cos(wave * y));
      }
      phi[grid.index(i, j)] = value;
    }
  }
  return phi;
}

double extinction_scale(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendKind::RoundSphere: return spec.c0 / (2.0 * (spec.n - 1));
    case BackendKind::BergerSphere: return std::min({spec.A0, spec.B0, spec.C0}) / 4.0;
    case BackendKind::ConformalTorus: break;
  }
  return std::numeric_limits<double>::infinity();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
}

std::string kind_label(BackendKind kind) {
  switch (kind) {
    case BackendKind::RoundSphere: return "round_sphere";
    case BackendKind::BergerSphere: return "berger_sphere";
    case BackendKind::ConformalTorus: return "conformal_torus";
  }
  return "unknown";
}

void write_proof_chain_csv(const std::filesystem::path& path, const std::vector<VariationRow>& chain) {
  std::string text = "t,endpoint,mass,F,S,dSdt_fd,res_S,dFdt_fd,dF_rhs,res_F,lapf_moment,gradf_moment\n";
  for (const auto& r : chain) {
    text += format_number(r.t) + ',' + (r.endpoint ? "1" : "0");
    for (double x : {r.mass, r.F, r.S, r.dS_dt_fd, r.residual_S, r.dF_dt_fd, r.dF_rhs, r.residual_F,
                     r.laplacian_f_moment, r.gradient_f_moment}) {
      text += ',' + format_number(x);
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::string text;
  const bool homogeneous = is_homogeneous(traj.backend);
  if (homogeneous) {
    text = traj.states.empty() || traj.states.front().params.size() == 1 ? "t,c,volume\n" : "t,A,B,C,volume\n";
  } else {
    text = "t,min_phi,max_phi,volume\n";
  }
  for (const auto& m : traj.states) {
    text += format_number(m.t);
    if (homogeneous) {
      for (double p : m.params) text += ',' + format_number(p);
    } else {
      const auto [lo, hi] = std::minmax_element(m.params.begin(), m.params.end());
      text += ',' + format_number(*lo) + ',' + format_number(*hi);
    }
    text += ',' + format_number(volume(m)) + '\n';
  }
  write_text(path, text);
}

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["rows"] = s.rows;
  j["max_mass_drift"] = s.max_mass_drift;
  j["lambda0_decreases"] = s.lambda0_decreases;
  j["max_interior_residual_S"] = s.max_residual_S;
  j["max_interior_residual_F"] = s.max_residual_F;
  j["equivalence_failures"] = s.equivalence_failures;
  j["sub_identity_failures"] = s.sub_identity_failures;
  j["adjusted"] = nlohmann::json::array();
  for (const auto& e : s.adjusted) {
    j["adjusted"].push_back({{"a", e.a},
                             {"max_interior_residual_theorem", e.max_residual_theorem},
                             {"max_residual_equivalence", e.max_residual_equivalence},
                             {"min_rhs_theorem", e.min_rhs_theorem},
                             {"max_abs_Y_minus_Y0", e.max_Y_deviation},
                             {"monotonicity_violations", e.monotonicity_violations}});
  }
  return j;
}

RunSummary summarize(const RunConfig& cfg, const std::vector<EntropyRecord>& records,
                     const std::vector<VariationRow>& chain, const std::vector<double>& mass) {
  RunSummary s;
  s.rows = records.size();
  for (double m : mass) s.max_mass_drift = std::max(s.max_mass_drift, std::abs(m - 1.0));
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    if (records[k + 1].lambda0 < records[k].lambda0 - kLambda0Slack) ++s.lambda0_decreases;
  }
  for (const auto& r : chain) {
    if (r.endpoint) continue;
    s.max_residual_S = std::max(s.max_residual_S, r.residual_S);
    s.max_residual_F = std::max(s.max_residual_F, r.residual_F);
  }
  const auto flags = equivalence_check(records, chain, cfg.tol_equiv);
  for (const auto& f : flags) {
    if (!f.rhs_agree) ++s.equivalence_failures;
    if (!f.sub_identity) ++s.sub_identity_failures;
  }
  for (std::size_t i = 0; i < cfg.a.size(); ++i) {
    AdjustedSummary e;
    e.a = cfg.a[i];
    e.min_rhs_theorem = std::numeric_limits<double>::infinity();
    std::vector<double> Y;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& x = records[k].adjusted[i];
      Y.push_back(x.Y);
      if (!chain.empty() && !chain[k].endpoint) e.max_residual_theorem = std::max(e.max_residual_theorem, x.residual_theorem);
      e.max_residual_equivalence = std::max(e.max_residual_equivalence, x.residual_equivalence);
      e.min_rhs_theorem = std::min(e.min_rhs_theorem, x.rhs_theorem);
      e.max_Y_deviation = std::max(e.max_Y_deviation, std::abs(x.Y - records.front().adjusted[i].Y));
    }
    const auto v = monotonicity_check(Y, cfg.tol_mono);
    e.monotonicity_violations = static_cast<int>(std::count(v.begin(), v.end(), true));
    s.adjusted.push_back(e);
  }
  return s;
}

}  // namespace

const char* code_version() { return "riccilab " RICCILAB_VERSION; }

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_label(double a) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, a);
  return std::string(buf, ptr);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, std::string> seen;
  std::stringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(line_no), "empty key");
    if (seen.count(key)) config_error(key, "duplicate key");
    seen[key] = value;
    cfg.echo.emplace_back(key, value);

    auto& b = cfg.backend;
    if (key == "backend.kind") {
      if (value == "round_sphere") b.kind = BackendKind::RoundSphere;
      else if (value == "berger_sphere") b.kind = BackendKind::BergerSphere;
      else if (value == "conformal_torus") b.kind = BackendKind::ConformalTorus;
      else config_error(key, "unknown backend '" + value + "'");
    } else if (key == "backend.n") {
      b.n = static_cast<int>(parse_integer(key, value));
    } else if (key == "backend.c0") {
      b.c0 = parse_real(key, value);
    } else if (key == "backend.A0") {
      b.A0 = parse_real(key, value);
    } else if (key == "backend.B0") {
      b.B0 = parse_real(key, value);
    } else if (key == "backend.C0") {
      b.C0 = parse_real(key, value);
    } else if (key == "backend.N") {
      b.N = static_cast<int>(parse_integer(key, value));
    } else if (key == "backend.L") {
      b.L = parse_real(key, value);
    } else if (key == "backend.phi0") {
      if (value != "zero" && value != "constant" && value != "sin_x" && value != "sin_xy" && value != "cos_sum") {
        config_error(key, "unknown recipe '" + value + "'");
      }
      b.phi0 = value;
    } else if (key == "backend.phi0.amplitude") {
      b.phi0_amplitude = parse_real(key, value);
    } else if (key == "backend.phi0.mode") {
      b.phi0_mode = static_cast<int>(parse_integer(key, value));
    } else if (key == "flow.T") {
      cfg.T = parse_real(key, value);
    } else if (key == "flow.dt") {
      if (value == "auto") cfg.dt.reset();
      else cfg.dt = parse_real(key, value);
    } else if (key == "flow.safety") {
      cfg.safety = parse_real(key, value);
    } else if (key == "flow.cap") {
      if (value == "none") cfg.cap.reset();
      else cfg.cap = parse_real(key, value);
    } else if (key == "heat.datum") {
      if (value == "constant") cfg.datum.kind = DatumKind::Constant;
      else if (value == "bump") cfg.datum.kind = DatumKind::Bump;
      else if (value == "random_smooth") cfg.datum.kind = DatumKind::RandomSmooth;
      else config_error(key, "unknown datum '" + value + "'");
    } else if (key == "heat.seed") {
      const auto seed = parse_integer(key, value);
      if (seed < 0) config_error(key, "seed must be >= 0");
      cfg.datum.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "heat.amplitude") {
      cfg.datum.amplitude = parse_real(key, value);
    } else if (key == "heat.width") {
      cfg.datum.width = parse_real(key, value);
    } else if (key == "heat.center_x") {
      cfg.datum.center_x = parse_real(key, value);
    } else if (key == "heat.center_y") {
      cfg.datum.center_y = parse_real(key, value);
    } else if (key == "heat.modes") {
      cfg.datum.modes = static_cast<int>(parse_integer(key, value));
    } else if (key == "entropy.a") {
      cfg.a = parse_list(key, value);
    } else if (key == "tol.mono") {
      cfg.tol_mono = parse_real(key, value);
    } else if (key == "tol.equiv") {
      cfg.tol_equiv = parse_real(key, value);
    } else if (key == "tol.mass") {
      cfg.tol_mass = parse_real(key, value);
    } else if (key == "out.dir") {
      cfg.out_dir = value;
    } else if (key == "out.trajectory") {
      cfg.dump_trajectory = parse_bool(key, value);
    } else {
      config_error(key, "unknown key");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MetricState initial_metric(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendKind::RoundSphere: return round_sphere(spec.n, spec.c0);
    case BackendKind::BergerSphere: return berger_sphere(spec.A0, spec.B0, spec.C0);
    case BackendKind::ConformalTorus: {
      const ConformalTorus grid{spec.N, spec.L};
      validate(BackendId{grid});
      return conformal_torus(grid, phi0_field(spec));
    }
  }
  throw Error(ErrorKind::Config, "backend.kind: unknown backend");
}

CheckedConfig validate_config(const RunConfig& config) {
  if (!(config.tol_mono > 0.0)) config_error("tol.mono", "must be > 0");
  if (!(config.tol_equiv > 0.0)) config_error("tol.equiv", "must be > 0");
  if (!(config.tol_mass > 0.0)) config_error("tol.mass", "must be > 0");
  if (config.a.empty()) config_error("entropy.a", "list must be nonempty");
  if (!(config.T > 0.0)) config_error("flow.T", "horizon must be > 0");
  if (config.dt && !(*config.dt > 0.0)) config_error("flow.dt", "must be > 0 or auto");
  if (!(config.safety > 0.0 && config.safety <= 1.0)) config_error("flow.safety", "must lie in (0, 1]");
  if (config.cap && !(*config.cap > 0.0)) config_error("flow.cap", "must be > 0 or none");
  if (config.backend.phi0_mode < 1) config_error("backend.phi0.mode", "must be >= 1");
  if (config.datum.modes < 1) config_error("heat.modes", "must be >= 1");
  if (!(config.datum.width > 0.0)) config_error("heat.width", "must be > 0");
  if (config.backend.kind == BackendKind::RoundSphere && config.backend.n < 2) config_error("backend.n", "must be >= 2");
  if (config.backend.kind == BackendKind::ConformalTorus &&
      (config.backend.N < 8 || config.backend.N % 2 != 0)) {
    config_error("backend.N", "must be even and >= 8");
  }
  if (config.backend.kind == BackendKind::ConformalTorus && !(config.backend.L > 0.0)) {
    config_error("backend.L", "must be > 0");
  }

  CheckedConfig checked{config, initial_metric(config.backend)};
  checked.dt = config.dt ? *config.dt : config.safety * stability_dt(checked.g0, 1.0);
  checked.T = config.T;
  if (config.cap) checked.T = std::min(checked.T, *config.cap * extinction_scale(config.backend));

  checked.lambda0_g0 = lambda0(checked.g0).value;
  for (double a : config.a) {
    if (!(a > -checked.lambda0_g0 + kAdmissibilityMargin)) {
      throw Error(ErrorKind::Admissibility, "entropy.a: a = " + format_label(a) + " violates a > -lambda0(g(0)) with lambda0 = " +
                                                format_number(checked.lambda0_g0));
    }
  }
  return checked;
}

void write_data_csv(const std::filesystem::path& path, const std::vector<double>& a_values,
                    const std::vector<EntropyRecord>& records) {
  std::string text = "t,F,S,lambda0";
  for (double a : a_values) {
    const auto l = '[' + format_label(a) + ']';
    text += ",Y" + l + ",omega" + l + ",dYdt_fd" + l + ",rhs_thm" + l + ",rhs_ye" + l + ",res_thm" + l + ",res_equiv" + l;
  }
  text += '\n';
  for (const auto& r : records) {
    text += format_number(r.t) + ',' + format_number(r.F) + ',' + format_number(r.S) + ',' + format_number(r.lambda0);
    for (const auto& e : r.adjusted) {
      for (double x : {e.Y, e.omega, e.dY_dt_fd, e.rhs_theorem, e.rhs_ye, e.residual_theorem, e.residual_equivalence}) {
        text += ',' + format_number(x);
      }
    }
    text += '\n';
  }
  write_text(path, text);
}

RunResult run(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  RunResult result;
  std::vector<RowEvaluation> rows;
  std::vector<double> lambda_values;

  try {
    result.checked = validate_config(config);
    const auto& checked = *result.checked;
    result.trajectory = integrate_forward(checked.g0, checked.T, checked.dt);
    const auto datum = terminal_datum(config.datum, result.trajectory.states.back());
    result.history = solve_backward(result.trajectory, datum, HeatOptions{config.tol_mass});

    std::optional<ScalarField> ground_state;
    for (std::size_t k = 0; k < result.trajectory.size(); ++k) {
      const auto& m = result.trajectory.states[k];
      // Successive metrics are close, so the previous ground state is a
      // deterministic and much better start vector than the constant.
      Lambda0Options opts;
      opts.start = ground_state;
      auto eig = lambda0(m, opts);
      if (!is_homogeneous(m.backend)) ground_state = std::move(eig.eigenvector);
      rows.push_back(evaluate_row(m, result.history.entries[k], config.a));
      lambda_values.push_back(eig.value);
    }
  } catch (const Error& e) {
    result.exit_code = e.is_config_error() ? kExitConfig : kExitNumerical;
    result.status = "failed";
    result.message = e.what();
  }

  // Assemble whatever rows exist; FD columns need at least three.
  const double dt = result.checked ? result.checked->dt : kNaN;
  const bool have_fd = rows.size() >= 3;
  std::vector<FdDerivative> dY;
  if (have_fd) {
    for (std::size_t i = 0; i < config.a.size(); ++i) {
      std::vector<double> Y;
      for (const auto& r : rows) Y.push_back(r.Y[i]);
      dY.push_back(fd_time_derivative(Y, dt));
    }
    result.chain = assemble_proof_chain(rows, dt);
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    EntropyRecord rec{r.t, r.F, r.S, lambda_values[k], {}};
    for (std::size_t i = 0; i < config.a.size(); ++i) {
      AdjustedEntry e;
      e.a = config.a[i];
      e.Y = r.Y[i];
      e.omega = r.omega[i];
      e.rhs_theorem = r.rhs_theorem[i];
      e.rhs_ye = r.rhs_ye[i];
      e.dY_dt_fd = have_fd ? dY[i].values[k] : kNaN;
      e.residual_theorem = std::abs(e.dY_dt_fd - e.rhs_theorem);
      e.residual_equivalence = std::abs(e.rhs_theorem - e.rhs_ye);
      rec.adjusted.push_back(e);
    }
    result.records.push_back(std::move(rec));
  }
  std::vector<double> masses;
  for (const auto& r : rows) masses.push_back(r.mass);
  result.summary = summarize(config, result.records, result.chain, masses);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_data_csv(out_dir / "data.csv", config.a, result.records);
    write_proof_chain_csv(out_dir / "proof_chain.csv", result.chain);
    if (config.dump_trajectory) write_trajectory_csv(out_dir / "trajectory.csv", result.trajectory);

    nlohmann::json manifest;
    manifest["status"] = result.status;
    manifest["exit_code"] = result.exit_code;
    if (!result.message.empty()) manifest["error"] = result.message;
    manifest["code_version"] = code_version();
    manifest["backend"] = kind_label(config.backend.kind);
    nlohmann::json echo = nlohmann::json::object();
    for (const auto& [k, v] : config.echo) echo[k] = v;
    manifest["config"] = echo;
    if (result.checked) {
      const auto& c = *result.checked;
      manifest["resolved"] = {{"dt", c.dt}, {"T", c.T}, {"steps", std::llround(c.T / c.dt)}};
      manifest["lambda0_g0"] = c.lambda0_g0;
      manifest["admissibility"] = nlohmann::json::array();
      for (double a : config.a) {
        manifest["admissibility"].push_back(
            {{"a", a}, {"condition", "a > -lambda0(g(0))"}, {"satisfied", a > -c.lambda0_g0 + kAdmissibilityMargin}});
      }
    }
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest["summary"] = summary_json(result.summary);
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  }
  return result;
}

std::vector<ConvergenceLevel> convergence_study(const RunConfig& config, int levels,
                                                const std::filesystem::path& out_dir) {
  if (levels < 3) config_error("--levels", "a convergence study needs at least 3 levels");
  if (config.backend.kind != BackendKind::ConformalTorus) {
    config_error("backend.kind", "convergence studies need the conformal_torus backend");
  }
  const auto base = validate_config(config);

  std::vector<ConvergenceLevel> table;
  for (int level = 0; level < levels; ++level) {
    RunConfig cfg = config;
    cfg.backend.N = config.backend.N << level;
    cfg.dt = base.dt / std::pow(4.0, level);
    const auto sub = out_dir.empty() ? out_dir : out_dir / ("level_" + std::to_string(level));
    const auto res = run(cfg, sub);

    ConvergenceLevel row;
    row.N = cfg.backend.N;
    row.dt = *cfg.dt;
    row.exit_code = res.exit_code;
    for (const auto& e : res.summary.adjusted) row.max_residual_theorem.push_back(e.max_residual_theorem);
    row.max_residual_S = res.summary.max_residual_S;
    row.max_residual_F = res.summary.max_residual_F;
    row.order_theorem.assign(config.a.size(), kNaN);
    row.order_S = row.order_F = kNaN;
    if (!table.empty() && res.exit_code == kExitOk && table.back().exit_code == kExitOk) {
      const auto& prev = table.back();
      for (std::size_t i = 0; i < config.a.size(); ++i) {
        row.order_theorem[i] = std::log2(prev.max_residual_theorem[i] / row.max_residual_theorem[i]);
      }
      row.order_S = std::log2(prev.max_residual_S / row.max_residual_S);
      row.order_F = std::log2(prev.max_residual_F / row.max_residual_F);
    }
    table.push_back(std::move(row));
  }

  if (!out_dir.empty()) {
    std::string text = "level,N,dt,exit_code";
    for (double a : config.a) {
      const auto l = '[' + format_label(a) + ']';
      text += ",max_res_thm" + l + ",order_thm" + l;
    }
    text += ",max_res_S,order_S,max_res_F,order_F\n";
    for (std::size_t k = 0; k < table.size(); ++k) {
      const auto& r = table[k];
      text += std::to_string(k) + ',' + std::to_string(r.N) + ',' + format_number(r.dt) + ',' + std::to_string(r.exit_code);
      for (std::size_t i = 0; i < config.a.size(); ++i) {
        text += ',' + format_number(i < r.max_residual_theorem.size() ? r.max_residual_theorem[i] : kNaN) + ',' +
                format_number(r.order_theorem[i]);
      }
      text += ',' + format_number(r.max_residual_S) + ',' + format_number(r.order_S) + ',' +
              format_number(r.max_residual_F) + ',' + format_number(r.order_F) + '\n';
    }
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "convergence.csv", text);
  }
  return table;
}

std::filesystem::path default_output_dir(const std::filesystem::path& config_path, const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  std::filesystem::path root = "runs";
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) root = env;
  return root / config_path.stem();
}

}  // namespace riccilab
