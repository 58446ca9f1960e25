// CLI: run full scenarios, verify invariant suites, or stop after the
// Ahlfors diagnostics. Exit 0 on a success verdict, 2 on inconclusive,
// 1 on configuration or geometry errors.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ahlfors/scenario.hpp"

namespace {

ahlfors::Scenario load_scenario(const std::string& config_path, long long seed_override,
                                const std::string& out_dir_override, int max_level_override,
                                double rtol_override) {
  auto cfg = ahlfors::Config::parse_file(config_path);
  ahlfors::Scenario sc = ahlfors::scenario_from_config(cfg);
  if (seed_override >= 0) sc.seed = (unsigned long long)seed_override;
  if (!out_dir_override.empty()) sc.out_dir = out_dir_override;
  if (max_level_override > 0) {
    sc.doubling.max_level = max_level_override;
    sc.concentration.max_level = max_level_override;
  }
  if (rtol_override > 0) {
    sc.quadrature.rtol = rtol_override;
    sc.diagnose.quadrature.rtol = rtol_override;
    sc.doubling.quadrature.rtol = rtol_override;
    sc.concentration.quadrature.rtol = rtol_override;
    sc.limits.quadrature.rtol = rtol_override;
  }
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ahlfors current pipeline: reparametrized limits of divergent disk families"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite;
  long long seed = -1;
  int max_level = 0;
  double rtol = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "scenario config file")->required();
    cmd->add_option("--seed", seed, "override the scenario seed");
    cmd->add_option("--out-dir", out_dir, "override the output directory");
    cmd->add_option("--max-level", max_level, "override the doubling depth");
    cmd->add_option("--rtol", rtol, "override the quadrature tolerance");
  };

  CLI::App* run = app.add_subcommand("run", "run the full pipeline");
  add_common(run);
  CLI::App* verify = app.add_subcommand("verify", "run an invariant suite");
  add_common(verify);
  verify->add_option("--suite", suite, "counting | packing | forest | stokes | equidistribution")
      ->required();
  CLI::App* diagnose = app.add_subcommand("diagnose", "stop after the Ahlfors diagnostics");
  add_common(diagnose);

  CLI11_PARSE(app, argc, argv);

  try {
    const ahlfors::Scenario sc = load_scenario(config_path, seed, out_dir, max_level, rtol);

    if (run->parsed()) {
      const ahlfors::RunOutcome out = ahlfors::run_scenario(sc);
      std::printf("scenario: %s\n", sc.name.c_str());
      std::printf("diagnose: %s (delta %.6g)\n", to_string(out.diagnostics.verdict).c_str(),
                  out.diagnostics.delta);
      if (out.isoperimetric)
        std::printf("isoperimetric constant: %.6g (excluded %d)\n", out.isoperimetric->constant,
                    out.isoperimetric->excluded);
      if (out.domain_set) std::printf("limit domain: %s\n", to_string(out.domain).c_str());
      if (out.report) {
        std::printf("explosions: %zu, K-area: %.6g, verdict: %s\n", out.report->explosions.size(),
                    out.report->k_intersection_area,
                    out.report->verdict == ahlfors::ConvergenceVerdict::Converged
                        ? "converged"
                        : "inconclusive");
      }
      if (!out.failure.empty()) std::printf("failure: %s\n", out.failure.c_str());
      std::printf("artifacts: %s\n", sc.out_dir.c_str());
      return out.exit_code;
    }

    if (verify->parsed()) {
      const auto rows = ahlfors::run_verify_suite(sc, suite);
      std::printf("check,measured,bound,pass\n");
      bool all = true;
      for (const auto& r : rows) {
        std::printf("%s,%.12g,%.12g,%s\n", r.check.c_str(), r.measured, r.bound,
                    r.pass ? "pass" : "FAIL");
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }

    const ahlfors::RunOutcome out = ahlfors::diagnose_scenario(sc);
    std::printf("verdict: %s\n", to_string(out.diagnostics.verdict).c_str());
    std::printf("delta: %.12g\n", out.diagnostics.delta);
    std::printf("decay_exponent: %.12g\n", out.diagnostics.decay_exponent);
    return out.exit_code;
  } catch (const ahlfors::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const ahlfors::geometry_error& e) {
    std::fprintf(stderr, "geometry inconsistency: %s\n", e.what());
    return 1;
  } catch (const ahlfors::quadrature_error& e) {
    std::fprintf(stderr, "quadrature error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
