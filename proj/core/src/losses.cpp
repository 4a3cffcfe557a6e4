#include "rkwf/losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rkwf {

void LossKind::validate() const {
  if (type == LossType::RkldRegularized && !(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("RKLD lambda must lie in (0, 1)");
  }
  if (type == LossType::PoissonFkld && epsilon && !(*epsilon > 0.0)) {
    throw std::invalid_argument("Poisson epsilon must be > 0");
  }
}

std::string to_string(LossType type) {
  switch (type) {
    case LossType::RkldRegularized: return "rkld";
    case LossType::IntensityL2: return "l2";
    case LossType::PoissonFkld: return "poisson";
    case LossType::ReshapedL2: return "reshaped";
  }
  return "unknown";
}

LossType loss_type_from_string(const std::string& name) {
  if (name == "rkld") return LossType::RkldRegularized;
  if (name == "l2") return LossType::IntensityL2;
  if (name == "poisson") return LossType::PoissonFkld;
  if (name == "reshaped") return LossType::ReshapedL2;
  throw std::invalid_argument("unknown loss '" + name + "' (expected rkld|l2|poisson|reshaped)");
}

namespace {

double poisson_epsilon(const LossKind& kind, const RealVector& y) {
  if (kind.epsilon) return *kind.epsilon;
  const double eps = 1e-12 * (y.size() > 0 ? y.mean() : 0.0);
  return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

struct Term {
  double value;
  double slope;  // dphi/dq
};

// One measurement's contribution. `mag` is |u_m|, q = mag^2.
template <LossType T>
Term term(double mag, double q, double y, double param) {
  if constexpr (T == LossType::RkldRegularized) {
    const double a = q + param;
    const double b = y + param;
    const double lr = std::log(a) - std::log(b);
    return {a * lr - a + b, lr};
  } else if constexpr (T == LossType::IntensityL2) {
    const double r = q - y;
    return {0.5 * r * r, r};
  } else if constexpr (T == LossType::PoissonFkld) {
    const double d = q + param;
    const double v = (y > 0.0 ? y * (std::log(y) - std::log(d)) : 0.0) - (y - q);
    return {v, 1.0 - y / d};
  } else {
    const double r = mag - std::sqrt(y);
    return {0.5 * r * r, mag > 0.0 ? 0.5 * r / mag : 0.0};
  }
}

template <LossType T>
LossEval evaluate_impl(const ComplexVector& u, const MeasurementOperator* op, const RealVector& y,
                       double param, const LossOptions& options, bool want_grad) {
  const Eigen::Index m = u.size();
  const RealVector* w = options.weights;
  double value = 0.0;
  ComplexVector weighted;
  if (want_grad) weighted.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    if (wi == 0.0) {
      if (want_grad) weighted[i] = 0.0;
      continue;
    }
    const double mag = std::abs(u[i]);
    const double q = std::norm(u[i]);
    const Term t = term<T>(mag, q, y[i], param);
    value += wi * t.value;
    if (want_grad) weighted[i] = (wi * t.slope) * u[i];
  }
  LossEval out;
  const double scale = options.normalize_by_m ? 1.0 / static_cast<double>(m) : 1.0;
  out.value = value * scale;
  if (want_grad) {
    out.grad = op->adjoint_apply(weighted);
    if (scale != 1.0) out.grad *= scale;
  }
  return out;
}

LossEval dispatch(const LossKind& kind, const ComplexVector& u, const MeasurementOperator* op,
                  const RealVector& y, const LossOptions& options, bool want_grad) {
  kind.validate();
  if (y.size() != u.size()) {
    throw std::invalid_argument("loss: y has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(u.size()));
  }
  if (options.weights && options.weights->size() != u.size()) {
    throw std::invalid_argument("loss: weight vector length mismatch");
  }
  switch (kind.type) {
    case LossType::RkldRegularized:
      return evaluate_impl<LossType::RkldRegularized>(u, op, y, kind.lambda, options, want_grad);
    case LossType::IntensityL2:
      return evaluate_impl<LossType::IntensityL2>(u, op, y, 0.0, options, want_grad);
    case LossType::PoissonFkld:
      return evaluate_impl<LossType::PoissonFkld>(u, op, y, poisson_epsilon(kind, y), options,
                                                  want_grad);
    case LossType::ReshapedL2:
      return evaluate_impl<LossType::ReshapedL2>(u, op, y, 0.0, options, want_grad);
  }
  throw std::logic_error("unhandled loss type");
}

}  // namespace

LossEval evaluate_loss_from_forward(const LossKind& kind, const ComplexVector& forward,
                                    const MeasurementOperator& op, const RealVector& y,
                                    const LossOptions& options) {
  return dispatch(kind, forward, &op, y, options, true);
}

LossEval evaluate_loss(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                       const RealVector& y, const LossOptions& options) {
  return evaluate_loss_from_forward(kind, op.apply(z), op, y, options);
}

double loss_value_from_forward(const LossKind& kind, const ComplexVector& forward,
                               const RealVector& y, const LossOptions& options) {
  return dispatch(kind, forward, nullptr, y, options, false).value;
}

double loss_value(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                  const RealVector& y, const LossOptions& options) {
  return loss_value_from_forward(kind, op.apply(z), y, options);
}

double rkld_value(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                  double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rkld_value: lambda must be > 0");
  return loss_value(LossKind::rkld(lambda), z, op, y);
}

ComplexVector rkld_grad(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double lambda, bool scale_by_m) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rkld_grad: lambda must be > 0");
  LossOptions options;
  options.normalize_by_m = scale_by_m;
  return evaluate_loss(LossKind::rkld(lambda), z, op, y, options).grad;
}

LossEval baseline_eval(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                       const RealVector& y) {
  LossOptions options;
  options.normalize_by_m = true;
  return evaluate_loss(kind, z, op, y, options);
}

}  // namespace rkwf
