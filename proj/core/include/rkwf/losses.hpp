#pragma once

#include <optional>
#include <string>

#include "rkwf/models.hpp"

namespace rkwf {

enum class LossType { RkldRegularized, IntensityL2, PoissonFkld, ReshapedL2 };

struct LossKind {
  LossType type = LossType::RkldRegularized;
  double lambda = 1e-8;            // RKLD regularizer, 0 < lambda < 1
  std::optional<double> epsilon;   // Poisson guard; defaults to 1e-12 * mean(y)

  static LossKind rkld(double lambda = 1e-8) { return {LossType::RkldRegularized, lambda, {}}; }
  static LossKind intensity_l2() { return {LossType::IntensityL2, 1e-8, {}}; }
  static LossKind poisson(std::optional<double> epsilon = {}) {
    return {LossType::PoissonFkld, 1e-8, epsilon};
  }
  static LossKind reshaped_l2() { return {LossType::ReshapedL2, 1e-8, {}}; }

  void validate() const;
};

std::string to_string(LossType type);
LossType loss_type_from_string(const std::string& name);

struct LossEval {
  double value = 0.0;
  ComplexVector grad;
};

struct LossOptions {
  /// Per-measurement weights (0/1 for truncation masks). Empty means all ones.
  const RealVector* weights = nullptr;
  /// Divide value and gradient by M.
  bool normalize_by_m = false;
};

/// Loss value and Wirtinger gradient grad = df/d(conj z).
///
/// With q = |Az|^2 and u = Az, every loss has the form sum_m phi(q_m, y_m), and
/// the gradient is A^*[u . dphi/dq]. Per-measurement terms:
///   RKLD:      (q+l) log((q+l)/(y+l)) - (q+l) + (y+l)   dphi/dq = log((q+l)/(y+l))
///   L2:        (q-y)^2 / 2                              dphi/dq = q - y
///   Poisson:   y log(y/(q+e)) - (y-q)                   dphi/dq = 1 - y/(q+e)
///   Reshaped:  (|u| - sqrt(y))^2 / 2                    dphi/dq = (|u|-sqrt y) / (2|u|)
/// The reshaped term contributes nothing where u = 0.
LossEval evaluate_loss(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                       const RealVector& y, const LossOptions& options = {});

/// Same as evaluate_loss with the forward image u = Az already computed.
LossEval evaluate_loss_from_forward(const LossKind& kind, const ComplexVector& forward,
                                    const MeasurementOperator& op, const RealVector& y,
                                    const LossOptions& options = {});

/// Loss value only; needs a single forward application.
double loss_value(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                  const RealVector& y, const LossOptions& options = {});
double loss_value_from_forward(const LossKind& kind, const ComplexVector& forward,
                               const RealVector& y, const LossOptions& options = {});

/// Regularized reverse-KL divergence between |Az|^2 and y. Nonnegative and zero
/// exactly at |Az|^2 = y.
double rkld_value(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                  double lambda);

/// A^*[Az . (log(|Az|^2 + lambda) - log(y + lambda))], optionally divided by M.
ComplexVector rkld_grad(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double lambda, bool scale_by_m = false);

/// Baseline losses with the 1/M normalization used by the WF literature.
LossEval baseline_eval(const LossKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                       const RealVector& y);

}  // namespace rkwf
