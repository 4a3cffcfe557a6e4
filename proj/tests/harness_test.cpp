#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rkwf/harness.hpp"
#include "test_support.hpp"

using namespace rkwf;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.n = 16;
  s.alphas = {6.0};
  s.trials = 3;
  s.base_seed = 42;
  s.max_iters = 60;
  s.algorithms = {{"rkld-wf-gaussian", preset("rkld-wf-gaussian")}, {"wf-l2", preset("wf-l2")}};
  return s;
}

void expect_same_except_time(const ResultTable& a, const ResultTable& b) {
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    const auto &x = a.trials[i], &y = b.trials[i];
    EXPECT_EQ(x.algorithm, y.algorithm);
    EXPECT_EQ(x.sweep_value, y.sweep_value);
    EXPECT_EQ(x.trial, y.trial);
    EXPECT_EQ(x.seed, y.seed);
    EXPECT_EQ(x.dist, y.dist);
    EXPECT_EQ(x.rel_err, y.rel_err);
    EXPECT_EQ(x.iterations, y.iterations);
    EXPECT_EQ(x.success, y.success);
    EXPECT_EQ(x.aborted, y.aborted);
  }
  ASSERT_EQ(a.aggregates.size(), b.aggregates.size());
  for (std::size_t i = 0; i < a.aggregates.size(); ++i) {
    EXPECT_EQ(a.aggregates[i].are, b.aggregates[i].are);
    EXPECT_EQ(a.aggregates[i].success_probability, b.aggregates[i].success_probability);
  }
}

}  // namespace

TEST(SignalDraw, ShapesAndMoments) {
  Rng rng(1);
  const auto r = signal_draw(SignalKind::RealGaussian, 2000, rng);
  EXPECT_EQ(r.imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(r.real().mean(), 0.0, 0.1);
  EXPECT_NEAR(r.real().squaredNorm() / 2000, 1.0, 0.1);
  const auto c = signal_draw(SignalKind::ComplexGaussian, 2000, rng);
  EXPECT_NEAR(c.squaredNorm() / 2000, 2.0, 0.2);
  EXPECT_TRUE(signal_for_seed(SignalKind::ComplexGaussian, 8, 3) ==
              signal_for_seed(SignalKind::ComplexGaussian, 8, 3));
  EXPECT_THROW(signal_draw(SignalKind::RealGaussian, 0, rng), std::invalid_argument);
  EXPECT_THROW(signal_kind_from_string("x"), std::invalid_argument);
}

TEST(ExperimentSpec, Validation) {
  auto s = small_spec();
  EXPECT_NO_THROW(s.validate());
  s.algorithms.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.alphas = {4, 6};
  s.rhos = {0.0, 0.1};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.trials = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.rhos = {1.5};
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sweep, PointsAndVariable) {
  auto s = small_spec();
  s.alphas = {3, 4, 5};
  auto pts = sweep_points(s);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[1].sweep_var, "alpha");
  EXPECT_EQ(pts[2].sweep_value, 5.0);
  s = small_spec();
  s.thetas = {1, 5};
  pts = sweep_points(s);
  EXPECT_EQ(pts[0].sweep_var, "theta");
  EXPECT_EQ(pts[1].corruption.theta, 5.0);
  s.model = ModelKind::Cdp;
  s.thetas = {0};
  s.l_patterns = {2, 4};
  pts = sweep_points(s);
  EXPECT_EQ(pts[1].sweep_var, "L");
  EXPECT_EQ(pts[1].l_patterns, 4);
}

TEST(Seeds, DistinctAcrossPointsAndTrials) {
  std::set<std::uint64_t> seen;
  for (std::size_t p = 0; p < 20; ++p)
    for (int t = 0; t < 50; ++t) seen.insert(trial_seed(7, p, t));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(trial_seed(7, 0, 0), trial_seed(8, 0, 0));
}

TEST(TrialProblem, SizesFromSpec) {
  auto s = small_spec();
  s.alphas = {4.5};
  const auto p = sweep_points(s)[0];
  const auto x = signal_for_seed(s.signal, s.n, 1);
  const auto prob = make_trial_problem(s, p, x, 9);
  EXPECT_EQ(prob.op.rows(), 72);
  EXPECT_EQ(prob.y.size(), 72);
  s.model = ModelKind::Cdp;
  s.l_patterns = {3};
  const auto cdp = make_trial_problem(s, sweep_points(s)[0], x, 9);
  EXPECT_EQ(cdp.op.rows(), 48);
}

TEST(Run, SingleTrialTable) {
  auto s = small_spec();
  s.trials = 1;
  s.algorithms.resize(1);
  const auto t = run_experiment(s);
  ASSERT_EQ(t.trials.size(), 1u);
  ASSERT_EQ(t.aggregates.size(), 1u);
  EXPECT_EQ(t.aggregates[0].trials, 1);
  EXPECT_EQ(t.aggregates[0].are, t.trials[0].rel_err);
}

TEST(Run, DeterministicAndThreadIndependent) {
  auto s = small_spec();
  s.alphas = {3, 6};
  const auto a = run_experiment(s, 1);
  const auto b = run_experiment(s, 1);
  const auto c = run_experiment(s, 8);
  expect_same_except_time(a, b);
  expect_same_except_time(a, c);
  // Slot order: point, algorithm, trial.
  EXPECT_EQ(a.trials[0].algorithm, "rkld-wf-gaussian");
  EXPECT_EQ(a.trials[3].algorithm, "wf-l2");
  EXPECT_EQ(a.trials[6].sweep_value, 6.0);
}

TEST(Run, AlgorithmsShareInstances) {
  const auto t = run_experiment(small_spec());
  for (int i = 0; i < 3; ++i) EXPECT_EQ(t.trials[i].seed, t.trials[3 + i].seed);
}

TEST(Run, AggregatesMatchRecomputation) {
  auto s = small_spec();
  s.thetas = {0.0, 10.0};
  s.rhos = {0.1};
  const auto t = run_experiment(s);
  for (const auto& row : t.aggregates) {
    std::vector<TrialRecord> g;
    for (const auto& r : t.trials)
      if (r.algorithm == row.algorithm && r.sweep_value == row.sweep_value) g.push_back(r);
    ASSERT_EQ(static_cast<int>(g.size()), row.trials);
    double sum = 0;
    int ok = 0, aborted = 0;
    for (const auto& r : g) {
      sum += std::isfinite(r.rel_err) ? std::min(r.rel_err, s.are_cap) : s.are_cap;
      ok += !r.aborted && r.dist < s.success_threshold;
      aborted += r.aborted;
    }
    EXPECT_NEAR(row.are, sum / g.size(), 1e-15);
    EXPECT_EQ(row.success_probability, static_cast<double>(ok) / g.size());
    EXPECT_EQ(row.aborted, aborted);
  }
}

TEST(Run, AbortedTrialsAreRecorded) {
  auto s = small_spec();
  SolverConfig bad = preset("wf-l2");
  bad.step = StepPolicy::fixed(1e6);
  bad.step_normalization = StepNormalization::Off;
  s.algorithms = {{"exploding", bad}, {"rkld-wf-gaussian", preset("rkld-wf-gaussian")}};
  const auto t = run_experiment(s, 2);
  ASSERT_EQ(t.trials.size(), 6u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(t.trials[i].aborted);
    EXPECT_FALSE(t.trials[i].success);
  }
  EXPECT_EQ(t.aggregates[0].aborted, 3);
  EXPECT_EQ(t.aggregates[0].success_probability, 0.0);
  EXPECT_EQ(t.aggregates[1].aborted, 0);
}

TEST(Run, NoiselessGaussianRecovery) {
  ExperimentSpec s;
  s.n = 32;
  s.alphas = {6.0};
  s.trials = 20;
  s.base_seed = 2024;
  s.fresh_signal = true;
  s.algorithms = {{"rkld-wf-gaussian", preset("rkld-wf-gaussian")}};
  const auto t = run_experiment(s);
  EXPECT_GE(t.aggregates[0].success_probability, test::oracle()["empirical"]["rkld_wf_success_n32_alpha6"].get<double>() - 0.1);
}
