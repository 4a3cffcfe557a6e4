#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rkwf/init.hpp"
#include "rkwf/losses.hpp"
#include "rkwf/truncation.hpp"

namespace rkwf {

enum class StepType { Fixed, Heuristic, Backtracking };

struct StepPolicy {
  StepType type = StepType::Fixed;
  double mu = 0.6;       // Fixed
  double k0 = 330.0;     // Heuristic: mu_k = min(1 - exp(-k / k0), mu_max), k = 1, 2, ...
  double mu_max = 0.2;
  double beta = 0.5;     // Backtracking shrink factor
  double slope = 1e-4;   // Armijo constant
  double mu0 = 1.0;      // Backtracking initial trial step

  static StepPolicy fixed(double mu) { return {StepType::Fixed, mu}; }
  static StepPolicy heuristic(double k0, double mu_max) {
    StepPolicy p;
    p.type = StepType::Heuristic;
    p.k0 = k0;
    p.mu_max = mu_max;
    return p;
  }
  static StepPolicy backtracking(double beta = 0.5, double slope = 1e-4, double mu0 = 1.0) {
    StepPolicy p;
    p.type = StepType::Backtracking;
    p.beta = beta;
    p.slope = slope;
    p.mu0 = mu0;
    return p;
  }

  void validate() const;
};

std::string to_string(StepType type);
StepType step_type_from_string(const std::string& name);

enum class InitKind { Classical, Rkld, Provided };

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

/// Whether steps are divided by ||z0||^2. Auto applies it to the intensity-L2
/// loss only, whose gradient grows with the cube of the signal scale; the other
/// losses have scale-free gradients.
enum class StepNormalization { Auto, On, Off };

std::string to_string(StepNormalization mode);
StepNormalization step_normalization_from_string(const std::string& name);

struct SolverConfig {
  std::string name = "custom";
  LossKind loss = LossKind::rkld();
  TruncationKind truncation = TruncationKind::none();
  StepPolicy step = StepPolicy::fixed(0.6);
  int max_iters = 500;
  double stop_tol = 0.0;
  InitKind init = InitKind::Rkld;
  std::optional<ComplexVector> z0;  // used when init == Provided
  bool scale_grad_by_m = true;
  StepNormalization step_normalization = StepNormalization::Auto;
  std::optional<double> init_norm_override;
  PowerIterationOptions eig;
  double divergence_factor = 1e6;

  void validate() const;
  bool normalizes_step() const;
};

/// Named parameter sets: rkld-wf-gaussian, rkld-wf-cdp, rkld-mtwf, rkld-gtwf,
/// wf-l2, wf-poisson, rwf, median-twf, median-rwf.
SolverConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

struct TraceRecord {
  int iter = 0;
  double loss = 0.0;
  double rel_err = 0.0;  // NaN when no ground truth is available
  Eigen::Index kept_count = 0;
  double step = 0.0;     // effective step applied to the gradient
};

enum class SolverStatus { Converged, MaxIterations, Diverged, NonFinite };

std::string to_string(SolverStatus status);

struct SolverResult {
  ComplexVector z;
  int iterations = 0;
  bool converged = false;
  SolverStatus status = SolverStatus::MaxIterations;
  std::vector<TraceRecord> trace;  // init record followed by one per iteration
  SpectralEstimate init;
  // Set when the run aborted.
  std::optional<int> failed_iteration;
  std::optional<Eigen::Index> failed_index;
  std::string diagnostic;

  bool aborted() const {
    return status == SolverStatus::Diverged || status == SolverStatus::NonFinite;
  }
};

/// Gradient descent z_{k+1} = z_k - mu_k * grad f(z_k) over the (optionally
/// truncated) loss, starting from the configured initializer. Deterministic for
/// a given (problem, config).
SolverResult run(const ProblemInstance& problem, const SolverConfig& config);

}  // namespace rkwf
