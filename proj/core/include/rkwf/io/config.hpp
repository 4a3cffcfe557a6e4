#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "rkwf/harness.hpp"
#include "rkwf/solver.hpp"

namespace rkwf::io {

inline constexpr int kConfigSchemaVersion = 1;

/// Bad config document. line() is 1-based, or 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Experiment file (YAML). Every key is optional except schema_version and
/// algorithms; unknown keys are errors. Scalars are accepted where a sweep list
/// is expected.
///
///   schema_version: 1
///   experiment: {name, trials, base_seed, max_iters, success_threshold,
///                threshold_mode: absolute|relative, fresh_signal, are_cap}
///   model:      {kind: gaussian|cdp, n, alpha: [..], l_patterns: [..]}
///   signal:     {kind: complex|real}
///   corruption: {sigma: [..], theta: [..], rho: [..], signed_outliers}
///   algorithms: list of solver entries (see parse_solver_entry)
ExperimentSpec parse_experiment_config(const std::string& text);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

/// Solver file: schema_version plus a `solver` mapping holding one entry.
///
/// Entry keys: name, preset (base parameter set, default rkld-wf-gaussian),
/// loss: rkld|l2|poisson|reshaped, lambda, epsilon,
/// truncation: none|mean|median|one-sided-log, gamma_e, gamma_ub, gamma_h,
/// step: fixed|heuristic|backtracking, mu, k0, mu_max, beta, slope, mu0,
/// max_iters, stop_tol, init: classical|rkld, step_normalization: auto|on|off,
/// scale_grad_by_m, init_norm, eig_max_iters, eig_tol, divergence_factor.
/// A bare string entry names a preset.
SolverConfig parse_solver_config(const std::string& text);
SolverConfig load_solver_config(const std::filesystem::path& path);

}  // namespace rkwf::io
