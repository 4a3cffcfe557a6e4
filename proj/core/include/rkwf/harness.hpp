#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rkwf/metrics.hpp"
#include "rkwf/models.hpp"
#include "rkwf/solver.hpp"

namespace rkwf {

enum class SignalKind { ComplexGaussian, RealGaussian };

std::string to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& name);

/// ComplexGaussian: re, im ~ N(0, 1) i.i.d. RealGaussian: x ~ N(0, I), im = 0.
ComplexVector signal_draw(SignalKind kind, Eigen::Index n, Rng& rng);

/// Signal drawn from a stream derived from `seed`; the harness uses this for the
/// per-experiment (or per-trial, with fresh_signal) ground truth.
ComplexVector signal_for_seed(SignalKind kind, Eigen::Index n, std::uint64_t seed);

struct AlgorithmEntry {
  std::string name;
  SolverConfig config;
};

/// Monte-Carlo sweep. At most one of the sweep lists (alphas or l_patterns,
/// sigmas, thetas, rhos) may hold more than one value; that list names the
/// sweep variable.
struct ExperimentSpec {
  std::string name = "experiment";
  ModelKind model = ModelKind::Gaussian;
  Eigen::Index n = 64;
  std::vector<double> alphas = {6.0};   // Gaussian: M = round(alpha * N)
  std::vector<int> l_patterns = {8};    // CDP: M = L * N
  SignalKind signal = SignalKind::ComplexGaussian;
  std::vector<double> sigmas = {0.0};
  std::vector<double> thetas = {0.0};
  std::vector<double> rhos = {0.0};
  bool signed_outliers = false;
  std::vector<AlgorithmEntry> algorithms;
  int trials = 1;
  std::uint64_t base_seed = 1;
  std::optional<int> max_iters;  // overrides every algorithm's K when set
  double success_threshold = 1e-5;
  ThresholdMode threshold_mode = ThresholdMode::Absolute;
  bool fresh_signal = false;  // redraw x per trial instead of once per experiment
  double are_cap = 10.0;

  void validate() const;
};

struct SweepPoint {
  std::size_t index = 0;
  std::string sweep_var;
  double sweep_value = 0.0;
  double alpha = 0.0;
  int l_patterns = 0;
  CorruptionSpec corruption;
};

std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec);

/// Per-trial seed; shared by every algorithm at a sweep point so they see the
/// same instances.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t point_index, int trial);

/// Builds the problem instance for one trial (operator, corruption, truth).
ProblemInstance make_trial_problem(const ExperimentSpec& spec, const SweepPoint& point,
                                   const ComplexVector& x, std::uint64_t seed);

struct AggregateRow {
  std::string algorithm;
  std::string sweep_var;
  double sweep_value = 0.0;
  int trials = 0;
  double are = 0.0;
  double success_probability = 0.0;
  double acc = 0.0;
  double mean_iters = 0.0;
  int aborted = 0;
};

struct ResultTable {
  std::vector<TrialRecord> trials;  // ordered by (sweep point, algorithm, trial)
  std::vector<AggregateRow> aggregates;
};

/// Aggregates grouped by (algorithm, sweep_var, sweep_value) in first-seen order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials, double threshold,
                                    ThresholdMode mode, double are_cap);

/// Runs every (sweep point, trial) job on `threads` workers. The output does not
/// depend on the thread count apart from wall_ms. Solver aborts become failed
/// rows; they never stop the sweep.
ResultTable run_experiment(const ExperimentSpec& spec, int threads = 1);

}  // namespace rkwf
