#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riccilab/conjugate_heat.hpp"
#include "riccilab/functionals.hpp"
#include "riccilab/geometry.hpp"
#include "riccilab/variation.hpp"

namespace riccilab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default output root when neither
/// out.dir nor --out is given.
inline constexpr const char* kOutputRootEnv = "RICCILAB_OUTPUT_ROOT";

const char* code_version();

enum class BackendKind { RoundSphere, BergerSphere, ConformalTorus };

struct BackendSpec {
  BackendKind kind = BackendKind::RoundSphere;
  int n = 2;
  double c0 = 1.0;
  double A0 = 1.0, B0 = 1.0, C0 = 1.0;
  int N = 64;
  double L = 2.0 * std::numbers::pi;
  /// zero | constant | sin_x | sin_xy | cos_sum
  std::string phi0 = "zero";
  double phi0_amplitude = 0.0;
  int phi0_mode = 1;
};

struct RunConfig {
  BackendSpec backend;
  double T = 0.1;
  std::optional<double> dt;  // empty means "auto"
  double safety = 0.5;
  /// Fraction of the round-sphere extinction time the horizon is capped at;
  /// empty disables the cap.
  std::optional<double> cap = 0.5;
  DatumSpec datum;
  std::vector<double> a;
  double tol_mono = 1e-6;
  double tol_equiv = 1e-8;
  double tol_mass = 1e-6;
  std::string out_dir;
  bool dump_trajectory = false;
  /// key = value pairs as read, echoed into the manifest.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Flat "key = value" text with dotted keys; '#' starts a comment.
/// Throws Error(Config) naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

MetricState initial_metric(const BackendSpec& spec);

struct CheckedConfig {
  RunConfig config;
  MetricState g0;
  double dt = 0.0;
  double T = 0.0;
  double lambda0_g0 = 0.0;
};

/// Verifies every invariant of the config, resolves dt and the horizon, and
/// checks a > -lambda0(g(0)) + 1e-12 for every a.
/// Throws Error(Config) or Error(Admissibility).
CheckedConfig validate_config(const RunConfig& config);

struct AdjustedSummary {
  double a = 0.0;
  double max_residual_theorem = 0.0;  // interior rows only
  double max_residual_equivalence = 0.0;
  double min_rhs_theorem = 0.0;
  double max_Y_deviation = 0.0;  // max |Y(t) - Y(t_0)|
  int monotonicity_violations = 0;
};

struct RunSummary {
  std::size_t rows = 0;
  double max_mass_drift = 0.0;
  int lambda0_decreases = 0;  // steps with lambda0 dropping by more than 1e-8
  double max_residual_S = 0.0;  // interior rows only
  double max_residual_F = 0.0;
  int equivalence_failures = 0;
  int sub_identity_failures = 0;
  std::vector<AdjustedSummary> adjusted;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string status = "ok";
  std::string message;
  std::optional<CheckedConfig> checked;
  Trajectory trajectory;
  DensityHistory history;
  std::vector<EntropyRecord> records;
  std::vector<VariationRow> chain;
  RunSummary summary;
};

/// Forward flow, terminal datum, backward solve, per-step evaluation. Writes
/// data.csv, proof_chain.csv and manifest.json into out_dir (when non-empty);
/// failed runs keep whatever rows were produced and record the status.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

struct ConvergenceLevel {
  int N = 0;
  double dt = 0.0;
  int exit_code = kExitOk;
  std::vector<double> max_residual_theorem;  // per a
  double max_residual_S = 0.0;
  double max_residual_F = 0.0;
  std::vector<double> order_theorem;  // vs previous level, NaN on the first
  double order_S = 0.0;
  double order_F = 0.0;
};

/// Runs the config at (N, dt), (2N, dt/4), ... and reports observed orders
/// log2(e_k / e_{k+1}) per halving of h. Needs the torus backend and
/// levels >= 3, else Error(Config).
std::vector<ConvergenceLevel> convergence_study(const RunConfig& config, int levels,
                                                const std::filesystem::path& out_dir);

void write_data_csv(const std::filesystem::path& path, const std::vector<double>& a_values,
                    const std::vector<EntropyRecord>& records);
std::string format_number(double x);
/// Shortest round-trip text of a, used inside column names like Y[0.5].
std::string format_label(double a);

/// Default output directory for a config file.
std::filesystem::path default_output_dir(const std::filesystem::path& config_path, const RunConfig& config);

}  // namespace riccilab
