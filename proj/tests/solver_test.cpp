#include <gtest/gtest.h>

#include <cmath>

#include "rkwf/solver.hpp"
#include "test_support.hpp"

using namespace rkwf;

namespace {

ProblemInstance gaussian_problem(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  const ComplexVector x = test::random_cvec(n, rng, 2.0);
  auto op = sample_gaussian(m, n, rng);
  RealVector y = forward_intensity(op, x);
  return {std::move(op), std::move(y), x, {ModelKind::Gaussian, {}, seed}};
}

SolverConfig provided(SolverConfig c, const ComplexVector& z0) {
  c.init = InitKind::Provided;
  c.z0 = z0;
  return c;
}

}  // namespace

TEST(Preset, ReportedParameters) {
  const auto g = preset("rkld-wf-gaussian");
  EXPECT_EQ(g.step.type, StepType::Fixed);
  EXPECT_DOUBLE_EQ(g.step.mu, 0.6);
  EXPECT_DOUBLE_EQ(g.loss.lambda, 1e-8);
  EXPECT_EQ(g.max_iters, 500);
  EXPECT_DOUBLE_EQ(preset("rkld-wf-cdp").step.mu, 0.4);
  const auto l2 = preset("wf-l2");
  EXPECT_EQ(l2.step.type, StepType::Heuristic);
  EXPECT_DOUBLE_EQ(l2.step.k0, 330.0);
  EXPECT_DOUBLE_EQ(l2.step.mu_max, 0.2);
  EXPECT_EQ(preset("wf-poisson").step.type, StepType::Heuristic);
  EXPECT_EQ(preset("rkld-gtwf").truncation.type, TruncationType::OneSidedLog);
  EXPECT_DOUBLE_EQ(preset("rkld-gtwf").truncation.gamma_h, TruncationKind{}.gamma_h);
  EXPECT_EQ(preset("rkld-mtwf").truncation.type, TruncationType::MedianResidual);
  EXPECT_EQ(preset("median-twf").loss.type, LossType::PoissonFkld);
  EXPECT_EQ(preset("median-twf").truncation.type, TruncationType::MedianResidual);
  EXPECT_EQ(preset("median-rwf").loss.type, LossType::ReshapedL2);
  EXPECT_EQ(preset("median-rwf").truncation.type, TruncationType::MedianResidual);
  EXPECT_THROW(preset("nope"), std::invalid_argument);
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).validate()) << name;
}

TEST(Config, Validation) {
  SolverConfig c;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.stop_tol = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.init = InitKind::Provided;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SolverConfig{};
  c.step = StepPolicy::backtracking(1.5);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(StepPolicy::fixed(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(StepPolicy::heuristic(0.0, 0.2).validate(), std::invalid_argument);
}

TEST(Run, StartAtSolutionConvergesImmediately) {
  // RKLD and intensity-L2 residuals vanish exactly at x; Poisson (epsilon shift)
  // and reshaped (sqrt rounding) leave a round-off gradient, so those only stay put.
  const auto p = gaussian_problem(8, 48, 1);
  for (const auto& name : preset_names()) {
    const auto r = run(p, provided(preset(name), *p.x_true));
    const auto type = preset(name).loss.type;
    if (type == LossType::RkldRegularized || type == LossType::IntensityL2) {
      EXPECT_TRUE(r.converged) << name;
      EXPECT_EQ(r.iterations, 0) << name;
      EXPECT_EQ(r.trace.size(), 1u) << name;
      EXPECT_TRUE(r.z == *p.x_true) << name;
    } else {
      EXPECT_FALSE(r.aborted()) << name;
      EXPECT_LT(relative_error(*p.x_true, r.z), 1e-6) << name;
    }
  }
}

TEST(Run, OneDimensionalDynamicsFollowGradientFlow) {
  // f(z) = (|z|^2 + l) log((|z|^2 + l) / (4 + l)) - ..., z real: dz/dt = -z log(z^2 / 4).
  const auto op = MeasurementOperator::dense(ComplexMatrix::Ones(1, 1));
  ProblemInstance p{op, RealVector::Constant(1, 4.0), std::nullopt, {}};
  SolverConfig c = provided(preset("rkld-wf-gaussian"), ComplexVector::Ones(1));
  const double mu = 0.002;
  c.step = StepPolicy::fixed(mu);
  c.loss = LossKind::rkld(1e-14);

  auto flow = [](double z) { return -z * std::log(z * z / 4.0); };
  double z = 1.0;
  const double h = 1e-3;
  for (int k : {250, 1000, 4000}) {
    c.max_iters = k;
    const auto r = run(p, c);
    // RK4 integration to t = mu * k.
    z = 1.0;
    for (int s = 0; s < static_cast<int>(mu * k / h + 0.5); ++s) {
      const double k1 = flow(z), k2 = flow(z + h / 2 * k1), k3 = flow(z + h / 2 * k2), k4 = flow(z + h * k3);
      z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    EXPECT_NEAR(r.z[0].real(), z, 5e-3) << k;
    EXPECT_EQ(r.z[0].imag(), 0.0);
  }
  c.max_iters = 20000;
  EXPECT_NEAR(std::abs(run(p, c).z[0]), 2.0, 1e-9);
}

TEST(Run, TraceShapeAndDeterminism) {
  const auto p = gaussian_problem(16, 96, 2);
  SolverConfig c = preset("rkld-mtwf");
  c.max_iters = 40;
  const auto a = run(p, c);
  const auto b = run(p, c);
  ASSERT_EQ(a.trace.size(), static_cast<std::size_t>(a.iterations) + 1);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].iter, static_cast<int>(i));
    EXPECT_EQ(a.trace[i].loss, b.trace[i].loss);
    EXPECT_EQ(a.trace[i].rel_err, b.trace[i].rel_err);
    EXPECT_EQ(a.trace[i].kept_count, b.trace[i].kept_count);
    EXPECT_LE(a.trace[i].kept_count, 96);
  }
  EXPECT_TRUE(a.z == b.z);
}

TEST(Run, GlobalPhaseEquivariance) {
  const auto p = gaussian_problem(12, 72, 3);
  Rng rng(4);
  const ComplexVector z0 = *p.x_true + 0.3 * test::random_cvec(12, rng);
  const Complex ph = std::polar(1.0, 0.77);
  for (const auto& name : {"rkld-wf-gaussian", "rkld-gtwf", "wf-l2", "median-rwf"}) {
    for (int k = 1; k <= 10; ++k) {
      SolverConfig c = preset(name);
      c.max_iters = k;
      const auto a = run(p, provided(c, z0));
      const auto b = run(p, provided(c, ph * z0));
      EXPECT_LT((b.z - ph * a.z).norm(), 1e-10 * a.z.norm()) << name << " iter " << k;
    }
  }
}

TEST(Run, BacktrackingLossNonIncreasing) {
  for (std::uint64_t seed : {5, 6}) {
    const auto p = gaussian_problem(16, 80, seed);
    for (auto loss : {LossKind::rkld(), LossKind::intensity_l2(), LossKind::poisson(), LossKind::reshaped_l2()}) {
      SolverConfig c;
      c.loss = loss;
      c.init = InitKind::Classical;
      c.step = StepPolicy::backtracking();
      c.max_iters = 60;
      const auto r = run(p, c);
      for (std::size_t i = 1; i < r.trace.size(); ++i)
        EXPECT_LE(r.trace[i].loss, r.trace[i - 1].loss) << to_string(loss.type) << " iter " << i;
    }
  }
}

TEST(Run, NoOpTruncationReproducesPlainRun) {
  const auto p = gaussian_problem(16, 96, 7);
  SolverConfig plain = preset("rkld-wf-gaussian");
  plain.max_iters = 30;
  SolverConfig wide = plain;
  wide.truncation = TruncationKind::mean_residual(1e300);
  const auto a = run(p, plain);
  const auto b = run(p, wide);
  EXPECT_TRUE(a.z == b.z);
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].loss, b.trace[i].loss);
}

TEST(Run, HeuristicStepSchedule) {
  const auto p = gaussian_problem(8, 64, 8);
  SolverConfig c = preset("wf-l2");
  c.max_iters = 5;
  const auto r = run(p, c);
  const double scale = 1.0 / r.init.z0.squaredNorm();
  for (int k = 1; k <= 5; ++k)
    EXPECT_NEAR(r.trace[k].step, std::min(1 - std::exp(-k / 330.0), 0.2) * scale, 1e-15);
  SolverConfig f = preset("rkld-wf-gaussian");
  f.max_iters = 2;
  EXPECT_DOUBLE_EQ(run(p, f).trace[1].step, 0.6);
}

TEST(Run, StopTolerance) {
  const auto p = gaussian_problem(16, 96, 9);
  SolverConfig c = preset("rkld-wf-gaussian");
  c.max_iters = 2000;
  c.stop_tol = 1e-10;
  const auto r = run(p, c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.status, SolverStatus::Converged);
  EXPECT_LT(r.iterations, 2000);
  EXPECT_LT(relative_error(*p.x_true, r.z), 1e-9);
}

TEST(Run, NonFiniteAbortCarriesDiagnostic) {
  const auto p = gaussian_problem(4, 16, 10);
  SolverConfig c = provided(preset("wf-l2"), ComplexVector::Constant(4, 1e200));
  const auto r = run(p, c);
  EXPECT_EQ(r.status, SolverStatus::NonFinite);
  EXPECT_TRUE(r.aborted());
  ASSERT_TRUE(r.failed_iteration.has_value());
  EXPECT_EQ(*r.failed_iteration, 0);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Run, DivergenceGuard) {
  const auto p = gaussian_problem(8, 48, 11);
  SolverConfig c = preset("wf-l2");
  c.step = StepPolicy::fixed(50.0);
  c.step_normalization = StepNormalization::Off;
  const auto r = run(p, c);
  EXPECT_TRUE(r.aborted());
  EXPECT_TRUE(r.z.allFinite());
  EXPECT_LT(r.iterations, 500);
}

TEST(Run, ProvidedInitLengthChecked) {
  const auto p = gaussian_problem(4, 16, 12);
  EXPECT_THROW(run(p, provided(preset("rkld-wf-gaussian"), ComplexVector::Ones(3))), std::invalid_argument);
}

TEST(Run, NoGroundTruthGivesNanRelErr) {
  auto p = gaussian_problem(8, 48, 13);
  p.x_true.reset();
  SolverConfig c = preset("rkld-wf-gaussian");
  c.max_iters = 3;
  const auto r = run(p, c);
  for (const auto& t : r.trace) EXPECT_TRUE(std::isnan(t.rel_err));
}

TEST(Run, CdpRecoveryNoiseless) {
  Rng rng(14);
  const ComplexVector x = test::random_cvec(32, rng);
  auto op = sample_cdp(32, 6, rng);
  RealVector y = forward_intensity(op, x);
  ProblemInstance p{std::move(op), std::move(y), x, {ModelKind::Cdp, {}, 14}};
  const auto r = run(p, preset("rkld-wf-cdp"));
  EXPECT_LT(relative_error(x, r.z), 1e-10);
}
