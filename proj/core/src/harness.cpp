#include "rkwf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace rkwf {

std::string to_string(SignalKind kind) {
  return kind == SignalKind::ComplexGaussian ? "complex" : "real";
}

SignalKind signal_kind_from_string(const std::string& name) {
  if (name == "complex") return SignalKind::ComplexGaussian;
  if (name == "real") return SignalKind::RealGaussian;
  throw std::invalid_argument("unknown signal kind '" + name + "' (expected complex|real)");
}

ComplexVector signal_draw(SignalKind kind, Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("signal_draw: N must be >= 1");
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = kind == SignalKind::ComplexGaussian ? rng.normal() : 0.0;
    x[i] = {re, im};
  }
  return x;
}

void ExperimentSpec::validate() const {
  if (n < 1) throw std::invalid_argument("experiment: n must be >= 1");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("experiment: algorithm list is empty");
  if (model == ModelKind::Gaussian && alphas.empty()) throw std::invalid_argument("experiment: alpha list is empty");
  if (model == ModelKind::Cdp && l_patterns.empty()) throw std::invalid_argument("experiment: l_patterns list is empty");
  if (sigmas.empty() || thetas.empty() || rhos.empty()) {
    throw std::invalid_argument("experiment: corruption lists must be non-empty");
  }
  for (double a : alphas)
    if (!(a > 0.0) || std::lround(a * static_cast<double>(n)) < 1) throw std::invalid_argument("experiment: alpha must give M >= 1");
  for (int l : l_patterns)
    if (l < 1) throw std::invalid_argument("experiment: l_patterns must be >= 1");
  for (double s : sigmas) CorruptionSpec{s, 0.0, 0.0, false}.validate();
  for (double t : thetas) CorruptionSpec{0.0, t, 0.0, false}.validate();
  for (double r : rhos) CorruptionSpec{0.0, 0.0, r, false}.validate();
  const std::size_t model_len = model == ModelKind::Gaussian ? alphas.size() : l_patterns.size();
  const int multi = (model_len > 1) + (sigmas.size() > 1) + (thetas.size() > 1) + (rhos.size() > 1);
  if (multi > 1) throw std::invalid_argument("experiment: at most one sweep list may have more than one value");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("experiment: success_threshold must be > 0");
  if (!(are_cap > 0.0)) throw std::invalid_argument("experiment: are_cap must be > 0");
  if (max_iters && *max_iters < 1) throw std::invalid_argument("experiment: max_iters must be >= 1");
  for (const auto& a : algorithms) a.config.validate();
}

std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec) {
  const bool gaussian = spec.model == ModelKind::Gaussian;
  std::string var = gaussian ? "alpha" : "L";
  if (spec.sigmas.size() > 1) var = "sigma";
  if (spec.thetas.size() > 1) var = "theta";
  if (spec.rhos.size() > 1) var = "rho";

  std::vector<SweepPoint> points;
  const std::size_t model_len = gaussian ? spec.alphas.size() : spec.l_patterns.size();
  for (std::size_t mi = 0; mi < model_len; ++mi)
    for (double sigma : spec.sigmas)
      for (double theta : spec.thetas)
        for (double rho : spec.rhos) {
          SweepPoint p;
          p.index = points.size();
          p.sweep_var = var;
          if (gaussian) p.alpha = spec.alphas[mi];
          else p.l_patterns = spec.l_patterns[mi];
          p.corruption = {sigma, theta, rho, spec.signed_outliers};
          if (var == "alpha") p.sweep_value = p.alpha;
          else if (var == "L") p.sweep_value = p.l_patterns;
          else if (var == "sigma") p.sweep_value = sigma;
          else if (var == "theta") p.sweep_value = theta;
          else p.sweep_value = rho;
          points.push_back(p);
        }
  return points;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t point_index, int trial) {
  return derive_seed(base_seed, {0x7472ULL, point_index, static_cast<std::uint64_t>(trial)});
}

ComplexVector signal_for_seed(SignalKind kind, Eigen::Index n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x7369676eULL}));
  return signal_draw(kind, n, rng);
}

ProblemInstance make_trial_problem(const ExperimentSpec& spec, const SweepPoint& point,
                                   const ComplexVector& x, std::uint64_t seed) {
  Rng rng(seed);
  MeasurementOperator op =
      spec.model == ModelKind::Gaussian
          ? sample_gaussian(std::lround(point.alpha * static_cast<double>(spec.n)), spec.n, rng)
          : sample_cdp(spec.n, point.l_patterns, rng);
  const RealVector y_clean = forward_intensity(op, x);
  Corruption c = corrupt(y_clean, x.squaredNorm(), point.corruption, rng);
  return ProblemInstance{std::move(op), std::move(c.y), x,
                         ProblemMeta{spec.model, point.corruption, seed}};
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials, double threshold,
                                    ThresholdMode mode, double are_cap) {
  std::vector<AggregateRow> rows;
  std::vector<std::vector<TrialRecord>> groups;
  for (const auto& t : trials) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) {
      return r.algorithm == t.algorithm && r.sweep_var == t.sweep_var && r.sweep_value == t.sweep_value;
    });
    if (it == rows.end()) {
      rows.push_back({t.algorithm, t.sweep_var, t.sweep_value});
      groups.emplace_back();
      it = rows.end() - 1;
    }
    groups[static_cast<std::size_t>(it - rows.begin())].push_back(t);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& g = groups[i];
    auto& r = rows[i];
    r.trials = static_cast<int>(g.size());
    r.are = are(g, are_cap);
    r.success_probability = success_probability(g, threshold, mode);
    double acc_sum = 0.0;
    double iter_sum = 0.0;
    for (const auto& t : g) {
      acc_sum += t.acc;
      iter_sum += t.iterations;
      r.aborted += t.aborted ? 1 : 0;
    }
    r.acc = acc_sum / static_cast<double>(g.size());
    r.mean_iters = iter_sum / static_cast<double>(g.size());
  }
  return rows;
}

ResultTable run_experiment(const ExperimentSpec& spec, int threads) {
  spec.validate();
  const auto points = sweep_points(spec);
  const std::size_t n_alg = spec.algorithms.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::size_t n_jobs = points.size() * n_trials;

  const ComplexVector shared_x = signal_for_seed(spec.signal, spec.n, spec.base_seed);

  // Slot layout (point, algorithm, trial) fixes the output order independently
  // of which worker finishes first.
  std::vector<TrialRecord> slots(n_jobs * n_alg);
  auto slot = [&](std::size_t p, std::size_t a, std::size_t t) -> TrialRecord& {
    return slots[(p * n_alg + a) * n_trials + t];
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const std::size_t p = job / n_trials;
      const std::size_t t = job % n_trials;
      const SweepPoint& point = points[p];
      const std::uint64_t seed = trial_seed(spec.base_seed, point.index, static_cast<int>(t));
      try {
        const ComplexVector x = spec.fresh_signal ? signal_for_seed(spec.signal, spec.n, seed) : shared_x;
        const ProblemInstance problem = make_trial_problem(spec, point, x, seed);
        for (std::size_t a = 0; a < n_alg; ++a) {
          SolverConfig cfg = spec.algorithms[a].config;
          if (spec.max_iters) cfg.max_iters = *spec.max_iters;
          TrialRecord& rec = slot(p, a, t);
          rec.algorithm = spec.algorithms[a].name;
          rec.sweep_var = point.sweep_var;
          rec.sweep_value = point.sweep_value;
          rec.trial = static_cast<int>(t);
          rec.seed = seed;
          const auto start = std::chrono::steady_clock::now();
          try {
            const SolverResult res = run(problem, cfg);
            rec.dist = dist_up_to_phase(x, res.z);
            rec.rel_err = rec.dist / x.norm();
            rec.acc = res.z.norm() > 0.0 ? correlation(x, res.z) : 0.0;
            rec.iterations = res.iterations;
            rec.aborted = res.aborted();
          } catch (const std::invalid_argument&) {
            rec.dist = std::numeric_limits<double>::infinity();
            rec.rel_err = std::numeric_limits<double>::infinity();
            rec.aborted = true;
          }
          rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          rec.success = is_success(rec, spec.success_threshold, spec.threshold_mode);
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ResultTable table;
  table.trials = std::move(slots);
  table.aggregates = aggregate(table.trials, spec.success_threshold, spec.threshold_mode, spec.are_cap);
  return table;
}

}  // namespace rkwf
