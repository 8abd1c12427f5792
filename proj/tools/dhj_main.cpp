#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dhj/runner.hpp"

namespace {

// splits "256" or "64,64" into per-axis node counts
void parse_grid(const std::string& text, dhj::RunSpec& spec) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) {
      const int n = std::stoi(text);
      spec.grid = {n, n};
    } else {
      spec.grid = {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    }
  } catch (const std::exception&) {
    throw dhj::ConfigError("--grid: cannot parse \"" + text + "\"");
  }
  for (int d = 0; d < spec.problem.dim(); ++d) {
    if (spec.grid[d] < 4) throw dhj::ConfigError("--grid: need at least 4 nodes per axis");
  }
  if (spec.problem.dim() == 1) spec.grid[1] = 1;
}

void parse_window(const std::string& text, dhj::RunSpec& spec) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw dhj::ConfigError("--fit-window must look like T0:T1");
  }
  try {
    spec.fit_t0 = std::stod(text.substr(0, colon));
    spec.fit_t1 = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw dhj::ConfigError("--fit-window: cannot parse \"" + text + "\"");
  }
}

std::vector<std::string> split_checks(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dhj: discounted Hamilton-Jacobi solver and verification lab on flat tori"};
  app.require_subcommand(1);
  app.footer("Environment: DHJ_THREADS caps the worker count.");

  std::string config_path, grid_text = "256", checks_text, window_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "problem JSON")->required();
  };

  dhj::RunSpec spec;

  CLI::App* analyze = app.add_subcommand("analyze", "regime constant, class, smoothness cap");
  add_common(analyze);
  analyze->add_option("--out", spec.out_path, "report JSON path");
  analyze->add_option("--scan", spec.scan_per_axis, "scan nodes per axis (>= 8)");

  CLI::App* solve = app.add_subcommand("solve", "compute u on a grid");
  add_common(solve);
  solve->add_option("--method", spec.method, "sl | lf")->check(CLI::IsMember({"sl", "lf"}));
  solve->add_option("--grid", grid_text, "nodes per axis: N or N0,N1");
  solve->add_option("--tol", spec.tol, "sup-change stopping tolerance");
  solve->add_option("--out", spec.out_path, "field CSV path");
  solve->add_option("--stats", spec.stats_path, "stats JSON path");

  CLI::App* verify = app.add_subcommand("verify", "check a solved field");
  add_common(verify);
  verify->add_option("--field", spec.field_path, "field CSV from solve")->required();
  verify->add_option("--checks", checks_text,
                     "comma list from residual,oracle,invariance,bh,continuity (default all)");
  verify->add_option("--out", spec.out_path, "verification JSON path");
  verify->add_option("--seed", spec.seed, "oracle seed");
  verify->add_option("--method", spec.method, "re-solve method for continuity")
      ->check(CLI::IsMember({"sl", "lf"}));
  verify->add_option("--tol", spec.tol, "re-solve tolerance for continuity");
  verify->add_option("--residual-tol", spec.residual_tol, "residual threshold");
  verify->add_option("--oracle-tol", spec.oracle_tol, "oracle gap threshold");
  verify->add_option("--oracle-T", spec.oracle_T, "oracle horizon (default 4/alpha)");
  verify->add_option("--oracle-segments", spec.oracle_segments, "oracle curve segments");
  verify->add_option("--oracle-restarts", spec.oracle_restarts, "oracle restarts");
  verify->add_option("--invariance-factor", spec.invariance_factor,
                     "deviation threshold in units of h");
  verify->add_option("--invariance-starts", spec.invariance_starts, "trajectory starts");
  verify->add_option("--invariance-T", spec.invariance_T, "trajectory horizon");
  verify->add_option("--invariance-dt", spec.invariance_dt, "integrator step");
  verify->add_option("--bh-factor", spec.bh_factor, "margin floor in units of h");
  verify->add_option("--continuity-factor", spec.continuity_factor, "relative change bound");

  CLI::App* evolve = app.add_subcommand("evolve", "Cauchy stability experiment");
  add_common(evolve);
  evolve->add_option("--field", spec.field_path, "reference field CSV")->required();
  evolve->add_option("--perturb", spec.perturb, "const:AMP or sine:AMP:MODE");
  evolve->add_option("--T", spec.evolve_T, "final time")->required();
  evolve->add_option("--sample-every", spec.sample_every, "trace sample interval");
  evolve->add_option("--dt", spec.evolve_dt, "time step (default CFL-tight)");
  evolve->add_option("--fit-window", window_text, "T0:T1 window for the rate fit");
  evolve->add_option("--out", spec.out_path, "trace CSV path");
  evolve->add_option("--rate", spec.rate_path, "fitted-rate JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    spec.problem = dhj::load_problem(config_path);
    if (analyze->parsed()) {
      spec.command = dhj::Command::Analyze;
      return dhj::run_analyze(spec);
    }
    if (solve->parsed()) {
      spec.command = dhj::Command::Solve;
      parse_grid(grid_text, spec);
      return dhj::run_solve(spec);
    }
    if (verify->parsed()) {
      spec.command = dhj::Command::Verify;
      spec.checks = split_checks(checks_text);
      return dhj::run_verify(spec);
    }
    spec.command = dhj::Command::Evolve;
    if (!window_text.empty()) parse_window(window_text, spec);
    return dhj::run_evolve(spec);
  } catch (const dhj::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const dhj::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
