// Command-line front end: run, converge and check subcommands.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "riccilab/errors.hpp"
#include "riccilab/harness.hpp"

namespace {

using namespace riccilab;

void print_summary(const RunResult& res) {
  const auto& s = res.summary;
  std::printf("status            %s\n", res.status.c_str());
  if (!res.message.empty()) std::printf("error             %s\n", res.message.c_str());
  std::printf("rows              %zu\n", s.rows);
  if (s.rows == 0) return;
  std::printf("max mass drift    %.3e\n", s.max_mass_drift);
  std::printf("lambda0 decreases %d\n", s.lambda0_decreases);
  std::printf("max |dS/dt - F|   %.3e\n", s.max_residual_S);
  std::printf("max |dF/dt - 2|Q|^2| %.3e\n", s.max_residual_F);
  std::printf("equivalence fails %d (sub-identity %d)\n", s.equivalence_failures, s.sub_identity_failures);
  for (const auto& e : s.adjusted) {
    std::printf("a = %-8s res_thm %.3e  res_equiv %.3e  min rhs %.6g  mono violations %d\n",
                format_label(e.a).c_str(), e.max_residual_theorem, e.max_residual_equivalence, e.min_rhs_theorem,
                e.monotonicity_violations);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-entropy first-variation laboratory for the coupled Ricci flow system"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int levels = 3;

  auto* run_cmd = app.add_subcommand("run", "integrate one configuration and write data.csv / manifest.json");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_override, "output directory (overrides out.dir)");

  auto* conv_cmd = app.add_subcommand("converge", "repeat a torus run under (N, dt) -> (2N, dt/4)");
  conv_cmd->add_option("config", config_path, "config file")->required();
  conv_cmd->add_option("--levels", levels, "number of refinement levels (>= 3)");
  conv_cmd->add_option("--out", out_override, "output directory (overrides out.dir)");

  auto* check_cmd = app.add_subcommand("check", "validate a configuration without running it");
  check_cmd->add_option("config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = load_config(config_path);
    const std::filesystem::path out =
        out_override.empty() ? default_output_dir(config_path, config) : std::filesystem::path(out_override);

    if (check_cmd->parsed()) {
      const auto checked = validate_config(config);
      std::printf("ok: dt = %.6g, T = %.6g, steps = %lld, lambda0(g(0)) = %.12g\n", checked.dt, checked.T,
                  static_cast<long long>(std::llround(checked.T / checked.dt)), checked.lambda0_g0);
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      const auto res = run(config, out);
      print_summary(res);
      std::printf("output            %s\n", out.string().c_str());
      return res.exit_code;
    }
    const auto table = convergence_study(config, levels, out);
    int code = kExitOk;
    std::printf("%-6s %-6s %-12s", "level", "N", "dt");
    for (double a : config.a) std::printf(" res_thm[%s]  order ", format_label(a).c_str());
    std::printf(" res_S        order   res_F        order\n");
    for (std::size_t k = 0; k < table.size(); ++k) {
      const auto& r = table[k];
      if (r.exit_code != kExitOk) code = r.exit_code;
      std::printf("%-6zu %-6d %-12.4e", k, r.N, r.dt);
      for (std::size_t i = 0; i < r.max_residual_theorem.size(); ++i) {
        std::printf(" %-12.4e %-6.3f", r.max_residual_theorem[i], r.order_theorem[i]);
      }
      std::printf(" %-12.4e %-7.3f %-12.4e %-6.3f\n", r.max_residual_S, r.order_S, r.max_residual_F, r.order_F);
    }
    std::printf("output %s\n", out.string().c_str());
    return code;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.is_config_error() ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
