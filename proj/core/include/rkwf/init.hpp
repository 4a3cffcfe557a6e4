#pragma once

#include <optional>

#include "rkwf/models.hpp"

namespace rkwf {

enum class WeightKind { Classical, Rkld };

struct SpectralWeights {
  RealVector h;
  WeightKind kind = WeightKind::Classical;
};

/// h_m = y_m / M.
SpectralWeights classical_weights(const RealVector& y);

/// Minimum-distortion weights for the reverse-KL spectral estimate:
///   h_m = log( (y_m / ||y||_1) / (||a_m||^2 / sum_i ||a_i||^2) ).
/// Zero measurements are floored at 1e-12 * mean(y) before the logarithm so the
/// weight stays finite but strongly negative. Throws for an all-zero y.
SpectralWeights rkld_weights(const RealVector& y, const MeasurementOperator& op);

/// v -> A^* diag(h) A v, the matrix-free form of sum_m h_m a_m a_m^*.
HermitianApply spectral_operator(const SpectralWeights& weights, const MeasurementOperator& op);

/// sqrt(N * sum(y) / sum_m ||a_m||^2); equals sqrt(mean y) for unit-variance
/// Gaussian rows.
double norm_estimate(const MeasurementOperator& op, const RealVector& y);

struct SpectralEstimate {
  ComplexVector z0;
  double eigenvalue = 0.0;
  double scale = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // all weights zero: the operator carries no direction
};

/// z0 = scale * (leading eigenvector of sum_m h_m a_m a_m^*).
SpectralEstimate spectral_estimate(const SpectralWeights& weights, const MeasurementOperator& op,
                                   const RealVector& y, Rng& rng,
                                   const PowerIterationOptions& eig = {},
                                   std::optional<double> norm_override = {});

}  // namespace rkwf
