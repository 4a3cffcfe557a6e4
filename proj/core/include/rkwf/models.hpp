#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rkwf/core.hpp"

namespace rkwf {

/// Sampling operator z -> A z with rows a_m^*.
///
/// Two storage variants exist: an explicit dense matrix, and a coded
/// diffraction operator holding L modulation patterns. For the latter the
/// measurement index is m = l * N + k and
///   (A z)_m = sum_n z[n] d_l[n] exp(-2 pi i k n / N)
/// with an unnormalized DFT.
class MeasurementOperator {
 public:
  struct Dense {
    ComplexMatrix matrix;
  };
  struct Cdp {
    ComplexMatrix patterns;  // L x N, row l is d_l
  };

  static MeasurementOperator dense(ComplexMatrix matrix);
  static MeasurementOperator cdp(ComplexMatrix patterns);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_dense() const { return std::holds_alternative<Dense>(storage_); }
  bool is_cdp() const { return std::holds_alternative<Cdp>(storage_); }

  const ComplexMatrix& dense_matrix() const;
  const ComplexMatrix& cdp_patterns() const;
  Eigen::Index pattern_count() const;

  ComplexVector apply(const ComplexVector& z) const;
  ComplexVector adjoint_apply(const ComplexVector& u) const;

  /// ||a_m||^2 for every row, cached at construction.
  const RealVector& row_norms_sq() const { return row_norms_sq_; }

  /// Explicit M x N matrix. For CDP operators this materializes L*N*N entries.
  ComplexMatrix to_dense() const;

 private:
  MeasurementOperator(std::variant<Dense, Cdp> storage);

  std::variant<Dense, Cdp> storage_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  RealVector row_norms_sq_;
};

enum class ModelKind { Gaussian, Cdp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct CorruptionSpec {
  double sigma = 0.0;  // noise bound, in units of ||x||^2
  double theta = 0.0;  // outlier bound, in units of ||x||^2
  double rho = 0.0;    // outlier fraction
  bool signed_outliers = false;

  void validate() const;
};

struct ProblemMeta {
  ModelKind model = ModelKind::Gaussian;
  CorruptionSpec corruption;
  std::uint64_t seed = 0;
};

struct ProblemInstance {
  MeasurementOperator op;
  RealVector y;
  std::optional<ComplexVector> x_true;
  ProblemMeta meta;

  /// Throws std::invalid_argument when y or x_true disagree with the operator.
  void validate() const;
};

/// Dense operator with i.i.d. CN(0, 1) entries (real and imaginary parts each
/// N(0, 1/2)).
MeasurementOperator sample_gaussian(Eigen::Index m, Eigen::Index n, Rng& rng);

/// Octanary pattern entry: b1 * b2 with b1 uniform on {1, -1, i, -i} and
/// b2 = sqrt(2)/2 with probability 4/5, sqrt(3) with probability 1/5.
Complex sample_octanary(Rng& rng);

/// CDP operator with L octanary patterns of length N; M = L * N.
MeasurementOperator sample_cdp(Eigen::Index n, Eigen::Index l, Rng& rng);

/// |A z|^2 elementwise.
RealVector forward_intensity(const MeasurementOperator& op, const ComplexVector& z);

struct Corruption {
  RealVector y;
  std::vector<Eigen::Index> outlier_support;  // ascending
  RealVector noise;     // w
  RealVector outliers;  // eta
};

/// Number of outliers placed for fraction rho among m measurements.
Eigen::Index outlier_count(double rho, Eigen::Index m);

/// y = max(y_clean + eta + w, 0).
///
/// w_m ~ U(0, sigma ||x||^2) i.i.d.; eta is supported on floor(rho M) indices
/// drawn uniformly without replacement with magnitudes U(0, theta ||x||^2),
/// negated with probability 1/2 when signed_outliers is set.
Corruption corrupt(const RealVector& y_clean, double x_norm_sq, const CorruptionSpec& spec,
                   Rng& rng);

}  // namespace rkwf
