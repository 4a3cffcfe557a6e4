#include "rkwf/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rkwf {

void StepPolicy::validate() const {
  switch (type) {
    case StepType::Fixed:
      if (!(mu > 0.0)) throw std::invalid_argument("step mu must be > 0");
      return;
    case StepType::Heuristic:
      if (!(k0 > 0.0)) throw std::invalid_argument("step k0 must be > 0");
      if (!(mu_max > 0.0)) throw std::invalid_argument("step mu_max must be > 0");
      return;
    case StepType::Backtracking:
      if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("backtracking beta must lie in (0, 1)");
      if (!(slope > 0.0 && slope < 1.0)) throw std::invalid_argument("backtracking slope must lie in (0, 1)");
      if (!(mu0 > 0.0)) throw std::invalid_argument("backtracking mu0 must be > 0");
      return;
  }
}

std::string to_string(StepType type) {
  switch (type) {
    case StepType::Fixed: return "fixed";
    case StepType::Heuristic: return "heuristic";
    case StepType::Backtracking: return "backtracking";
  }
  return "unknown";
}

StepType step_type_from_string(const std::string& name) {
  if (name == "fixed") return StepType::Fixed;
  if (name == "heuristic") return StepType::Heuristic;
  if (name == "backtracking") return StepType::Backtracking;
  throw std::invalid_argument("unknown step policy '" + name +
                              "' (expected fixed|heuristic|backtracking)");
}

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Classical: return "classical";
    case InitKind::Rkld: return "rkld";
    case InitKind::Provided: return "provided";
  }
  return "unknown";
}

InitKind init_kind_from_string(const std::string& name) {
  if (name == "classical") return InitKind::Classical;
  if (name == "rkld") return InitKind::Rkld;
  if (name == "provided") return InitKind::Provided;
  throw std::invalid_argument("unknown init '" + name + "' (expected classical|rkld|provided)");
}

std::string to_string(StepNormalization mode) {
  switch (mode) {
    case StepNormalization::Auto: return "auto";
    case StepNormalization::On: return "on";
    case StepNormalization::Off: return "off";
  }
  return "unknown";
}

StepNormalization step_normalization_from_string(const std::string& name) {
  if (name == "auto") return StepNormalization::Auto;
  if (name == "on") return StepNormalization::On;
  if (name == "off") return StepNormalization::Off;
  throw std::invalid_argument("unknown step normalization '" + name + "' (expected auto|on|off)");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max_iterations";
    case SolverStatus::Diverged: return "diverged";
    case SolverStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  loss.validate();
  truncation.validate();
  step.validate();
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(stop_tol >= 0.0)) throw std::invalid_argument("stop_tol must be >= 0");
  if (init == InitKind::Provided && !z0) throw std::invalid_argument("init = provided requires z0");
  if (init_norm_override && !(*init_norm_override > 0.0)) {
    throw std::invalid_argument("init norm override must be > 0");
  }
  if (!(divergence_factor > 1.0)) throw std::invalid_argument("divergence_factor must be > 1");
}

bool SolverConfig::normalizes_step() const {
  switch (step_normalization) {
    case StepNormalization::On: return true;
    case StepNormalization::Off: return false;
    case StepNormalization::Auto: return loss.type == LossType::IntensityL2;
  }
  return false;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "rkld-wf-gaussian", "rkld-wf-cdp", "rkld-mtwf", "rkld-gtwf", "wf-l2",
      "wf-poisson",       "rwf",         "median-twf", "median-rwf"};
  return names;
}

SolverConfig preset(const std::string& name) {
  SolverConfig c;
  c.name = name;
  c.max_iters = 500;
  if (name == "rkld-wf-gaussian") {
    c.loss = LossKind::rkld(1e-8);
    c.step = StepPolicy::fixed(0.6);
    c.init = InitKind::Rkld;
  } else if (name == "rkld-wf-cdp") {
    c.loss = LossKind::rkld(1e-8);
    c.step = StepPolicy::fixed(0.4);
    c.init = InitKind::Rkld;
  } else if (name == "rkld-mtwf") {
    c.loss = LossKind::rkld(1e-8);
    c.truncation = TruncationKind::median_residual();
    c.step = StepPolicy::fixed(0.6);
    c.init = InitKind::Rkld;
  } else if (name == "rkld-gtwf") {
    c.loss = LossKind::rkld(1e-8);
    c.truncation = TruncationKind::one_sided_log();
    c.step = StepPolicy::fixed(0.6);
    c.init = InitKind::Rkld;
  } else if (name == "wf-l2") {
    c.loss = LossKind::intensity_l2();
    c.step = StepPolicy::heuristic(330.0, 0.2);
    c.init = InitKind::Classical;
  } else if (name == "wf-poisson") {
    c.loss = LossKind::poisson();
    c.step = StepPolicy::heuristic(330.0, 0.2);
    c.init = InitKind::Classical;
  } else if (name == "rwf") {
    c.loss = LossKind::reshaped_l2();
    c.step = StepPolicy::fixed(1.6);
    c.init = InitKind::Classical;
  } else if (name == "median-twf") {
    c.loss = LossKind::poisson();
    c.truncation = TruncationKind::median_residual();
    c.step = StepPolicy::fixed(0.6);
    c.init = InitKind::Classical;
  } else if (name == "median-rwf") {
    c.loss = LossKind::reshaped_l2();
    c.truncation = TruncationKind::median_residual();
    c.step = StepPolicy::fixed(1.2);
    c.init = InitKind::Classical;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

namespace {

double rel_err_or_nan(const ProblemInstance& p, const ComplexVector& z) {
  if (!p.x_true) return std::numeric_limits<double>::quiet_NaN();
  return relative_error(*p.x_true, z);
}

Eigen::Index first_non_finite(const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return i;
  return -1;
}

Eigen::Index first_non_finite(const RealVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return i;
  return -1;
}

SpectralEstimate initialize(const ProblemInstance& p, const SolverConfig& c) {
  if (c.init == InitKind::Provided) {
    if (c.z0->size() != p.op.cols()) {
      throw std::invalid_argument("provided z0 has length " + std::to_string(c.z0->size()) +
                                  ", expected " + std::to_string(p.op.cols()));
    }
    SpectralEstimate est;
    est.z0 = *c.z0;
    est.scale = c.z0->norm();
    est.converged = true;
    return est;
  }
  Rng rng(derive_seed(p.meta.seed, {0x696e6974ULL}));
  const SpectralWeights w =
      c.init == InitKind::Rkld ? rkld_weights(p.y, p.op) : classical_weights(p.y);
  return spectral_estimate(w, p.op, p.y, rng, c.eig, c.init_norm_override);
}

}  // namespace

SolverResult run(const ProblemInstance& problem, const SolverConfig& config) {
  config.validate();
  problem.validate();
  const MeasurementOperator& op = problem.op;
  const RealVector& y = problem.y;

  SolverResult result;
  result.init = initialize(problem, config);
  ComplexVector z = result.init.z0;

  const double z0_sq = z.squaredNorm();
  const double step_scale = config.normalizes_step() && z0_sq > 0.0 ? 1.0 / z0_sq : 1.0;

  LossOptions full;
  full.normalize_by_m = config.scale_grad_by_m;

  ComplexVector forward = op.apply(z);
  const double initial_loss = loss_value_from_forward(config.loss, forward, y, full);
  result.trace.push_back({0, initial_loss, rel_err_or_nan(problem, z), op.rows(), 0.0});

  auto abort = [&](SolverStatus status, int iter, Eigen::Index index, std::string msg) {
    result.status = status;
    result.failed_iteration = iter;
    if (index >= 0) result.failed_index = index;
    result.diagnostic = std::move(msg);
  };

  if (!std::isfinite(initial_loss)) {
    abort(SolverStatus::NonFinite, 0, first_non_finite(RealVector(forward.cwiseAbs2())),
          "non-finite loss at the initial estimate");
    result.z = z;
    return result;
  }

  for (int k = 0; k < config.max_iters; ++k) {
    const Mask mask = build_mask(config.truncation, forward, z.norm(), y);
    const RealVector weights = mask.weights();
    LossOptions masked = full;
    if (config.truncation.type != TruncationType::None) masked.weights = &weights;

    const LossEval eval = evaluate_loss_from_forward(config.loss, forward, op, y, masked);
    if (const Eigen::Index bad = first_non_finite(eval.grad); bad >= 0 || !std::isfinite(eval.value)) {
      abort(SolverStatus::NonFinite, k, bad, "non-finite gradient or loss");
      break;
    }
    const double grad_sq = eval.grad.squaredNorm();
    if (grad_sq == 0.0) {
      result.converged = true;
      result.status = SolverStatus::Converged;
      break;
    }

    double mu = 0.0;
    ComplexVector z_next;
    ComplexVector forward_next;
    switch (config.step.type) {
      case StepType::Fixed:
        mu = config.step.mu;
        break;
      case StepType::Heuristic:
        mu = std::min(1.0 - std::exp(-static_cast<double>(k + 1) / config.step.k0), config.step.mu_max);
        break;
      case StepType::Backtracking: {
        // Armijo on the masked objective; f(z - t g) ~ f(z) - 2 t ||g||^2.
        double t = config.step.mu0;
        bool accepted = false;
        for (int trial = 0; trial < 60; ++trial) {
          const double eff = t * step_scale;
          z_next = z - eff * eval.grad;
          forward_next = op.apply(z_next);
          const double f_next = loss_value_from_forward(config.loss, forward_next, y, masked);
          if (std::isfinite(f_next) && f_next <= eval.value - config.step.slope * eff * 2.0 * grad_sq) {
            accepted = true;
            break;
          }
          t *= config.step.beta;
        }
        mu = accepted ? t : 0.0;
        break;
      }
    }

    const double eff = mu * step_scale;
    if (config.step.type != StepType::Backtracking || mu == 0.0) {
      z_next = z - eff * eval.grad;
      forward_next = op.apply(z_next);
    }
    const double update_norm = eff * std::sqrt(grad_sq);

    const double loss = loss_value_from_forward(config.loss, forward_next, y, full);
    if (const Eigen::Index bad = first_non_finite(z_next); bad >= 0 || !std::isfinite(loss)) {
      abort(SolverStatus::NonFinite, k + 1, bad, "non-finite iterate or loss");
      break;
    }
    if (initial_loss > 0.0 && loss > config.divergence_factor * initial_loss) {
      abort(SolverStatus::Diverged, k + 1, -1, "loss exceeded divergence guard");
      break;
    }

    z = std::move(z_next);
    forward = std::move(forward_next);
    result.iterations = k + 1;
    result.trace.push_back({k + 1, loss, rel_err_or_nan(problem, z), mask.kept_count, eff});

    if (update_norm < config.stop_tol || update_norm == 0.0) {
      result.converged = true;
      result.status = SolverStatus::Converged;
      break;
    }
  }

  result.z = std::move(z);
  return result;
}

}  // namespace rkwf
