#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dhj/problem.hpp"
#include "dhj/regime.hpp"

namespace dhj {

enum class Command { Analyze, Solve, Verify, Evolve };

// One fully-resolved run: the problem plus every option any command reads.
// Defaults line up with the verification tolerances used throughout.
struct RunSpec {
  Command command = Command::Analyze;
  Problem problem;

  // solve
  std::string method = "sl";  // sl | lf
  std::array<int, 2> grid{256, 1};
  double tol = 1e-8;

  // analyze
  int scan_per_axis = 128;

  // verify
  std::vector<std::string> checks;  // subset of residual,oracle,invariance,bh,continuity
  double residual_tol = 5e-3;
  double oracle_tol = 5e-3;
  double invariance_factor = 10.0;  // threshold = factor * h
  double bh_factor = 10.0;          // margin >= -factor * h
  double continuity_factor = 0.05;
  double oracle_T = 0.0;  // 0: 4 / alpha
  int oracle_segments = 400;
  int oracle_restarts = 5;
  int invariance_starts = 20;
  double invariance_T = 2.0;
  double invariance_dt = 1e-3;

  // evolve
  std::string perturb = "const:0.01";  // const:AMP | sine:AMP:MODE
  double evolve_T = 2.0;
  double sample_every = 0.0;  // 0: T / 200
  double fit_t0 = -1.0;       // <0: 0.1 * T
  double fit_t1 = -1.0;       // <0: 0.9 * T
  double evolve_dt = 0.0;     // 0: CFL-tight

  // I/O
  std::string field_path;
  std::string out_path;
  std::string stats_path;
  std::string rate_path;

  std::uint64_t seed = 0;
};

// Problem JSON schema (one object):
//   {"dim":1,"periods":[1.0],
//    "potential":{"type":"fourier","modes":[{"k":[1],"re":0.05,"im":0.0}]},
//    "metric":[[1.0]],"drift":[0.0],"alpha":5.0}
// Each mode's Hermitian partner is implied; listing both k and -k is a
// configuration error. All problem invariants are checked here, with the
// offending field named in the error.
Problem problem_from_json_text(const std::string& text, const std::string& source);
Problem load_problem(const std::string& path);
std::string problem_to_json(const Problem& prob);

// RunSpec with the problem loaded from path and every other field at its
// default; commands fill in their options on top.
RunSpec load_config(const std::string& path);

std::string regime_report_json(const RegimeReport& rep);

// Each returns the process exit code: 0 success, 3 when verify ran but a
// check exceeded its tolerance. Configuration and numerical failures throw
// (the CLI maps them to exit codes 1 and 2).
int run_analyze(const RunSpec& spec);
int run_solve(const RunSpec& spec);
int run_verify(const RunSpec& spec);
int run_evolve(const RunSpec& spec);

}  // namespace dhj
