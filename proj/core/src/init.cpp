#include "rkwf/init.hpp"

#include <cmath>
#include <stdexcept>

namespace rkwf {

SpectralWeights classical_weights(const RealVector& y) {
  if ((y.array() < 0.0).any()) throw std::invalid_argument("classical_weights: y must be >= 0");
  return {y / static_cast<double>(y.size()), WeightKind::Classical};
}

SpectralWeights rkld_weights(const RealVector& y, const MeasurementOperator& op) {
  if (y.size() != op.rows()) throw std::invalid_argument("rkld_weights: y length mismatch");
  if ((y.array() < 0.0).any()) throw std::invalid_argument("rkld_weights: y must be >= 0");
  const double y_l1 = y.sum();
  if (!(y_l1 > 0.0)) throw std::invalid_argument("rkld_weights: y is identically zero");

  const RealVector& row_sq = op.row_norms_sq();
  const double row_total = row_sq.sum();
  const double floor = 1e-12 * y.mean();
  SpectralWeights w{RealVector(y.size()), WeightKind::Rkld};
  for (Eigen::Index m = 0; m < y.size(); ++m) {
    const double p = std::max(y[m], floor) / y_l1;
    const double r = row_sq[m] / row_total;
    w.h[m] = std::log(p) - std::log(r);
  }
  return w;
}

HermitianApply spectral_operator(const SpectralWeights& weights, const MeasurementOperator& op) {
  if (weights.h.size() != op.rows()) throw std::invalid_argument("spectral_operator: weight length mismatch");
  return [&op, h = weights.h](const ComplexVector& v) -> ComplexVector {
    ComplexVector u = op.apply(v);
    u.array() *= h.array().cast<Complex>();
    return op.adjoint_apply(u);
  };
}

double norm_estimate(const MeasurementOperator& op, const RealVector& y) {
  const double rows = op.row_norms_sq().sum();
  return std::sqrt(static_cast<double>(op.cols()) * y.sum() / rows);
}

SpectralEstimate spectral_estimate(const SpectralWeights& weights, const MeasurementOperator& op,
                                   const RealVector& y, Rng& rng, const PowerIterationOptions& eig,
                                   std::optional<double> norm_override) {
  if (y.size() != op.rows()) throw std::invalid_argument("spectral_estimate: y length mismatch");
  SpectralEstimate est;
  est.degenerate = weights.h.size() == 0 || (weights.h.array() == 0.0).all();
  const EigenResult top = leading_eigvec(spectral_operator(weights, op), op.cols(), rng, eig);
  est.eigenvalue = top.value;
  est.iterations = top.iterations;
  est.converged = top.converged && !est.degenerate;
  est.scale = norm_override ? *norm_override : norm_estimate(op, y);
  est.z0 = est.scale * top.vector;
  return est;
}

}  // namespace rkwf
