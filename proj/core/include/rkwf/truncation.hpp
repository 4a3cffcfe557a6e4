#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rkwf/models.hpp"

namespace rkwf {

enum class TruncationType { None, MeanResidual, MedianResidual, OneSidedLog };

struct TruncationKind {
  TruncationType type = TruncationType::None;
  double gamma_e = 3.0;   // residual bound multiplier (mean and median schemes)
  double gamma_ub = 5.0;  // upper bound on |a_m^* z| / ||z|| (median scheme)
  double gamma_h = 3.0;   // log-residual multiplier (one-sided scheme)

  static TruncationKind none() { return {}; }
  static TruncationKind mean_residual(double gamma_e = 3.0) {
    return {TruncationType::MeanResidual, gamma_e, 5.0, 3.0};
  }
  static TruncationKind median_residual(double gamma_ub = 5.0, double gamma_e = 3.0) {
    return {TruncationType::MedianResidual, gamma_e, gamma_ub, 3.0};
  }
  static TruncationKind one_sided_log(double gamma_h = 3.0) {
    return {TruncationType::OneSidedLog, 3.0, 5.0, gamma_h};
  }

  void validate() const;
};

std::string to_string(TruncationType type);
TruncationType truncation_type_from_string(const std::string& name);

struct Mask {
  std::vector<std::uint8_t> keep;  // 1 = measurement contributes
  Eigen::Index kept_count = 0;
  bool fallback = false;  // minimum-keep rule replaced an empty set

  Eigen::Index size() const { return static_cast<Eigen::Index>(keep.size()); }
  bool kept(Eigen::Index m) const { return keep[static_cast<std::size_t>(m)] != 0; }
  RealVector weights() const;
  static Mask all(Eigen::Index m);
};

/// Median with the midpoint convention for even sizes. Infinite values order
/// normally; a midpoint of -inf and +inf is taken as 0.
double median(std::span<const double> values);

/// Keep m iff |y_m - q_m| <= gamma_e * mean(|y - q|).
Mask mean_residual_mask(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double gamma_e);

/// Keep m iff |a_m^* z| / ||z|| <= gamma_ub and
///            |y_m - q_m| <= gamma_e * median(|y - q|) * |a_m^* z| / ||z||.
Mask median_residual_mask(const ComplexVector& z, const MeasurementOperator& op,
                          const RealVector& y, double gamma_ub, double gamma_e);

/// r_m = log y_m - log q_m, D = median(r); keep m iff r_m <= gamma_h * D.
/// y_m = 0 < q_m gives r_m = -inf (always kept); q_m = 0 < y_m gives +inf
/// (always dropped); y_m = q_m = 0 counts as an exact fit, r_m = 0.
Mask one_sided_log_mask(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double gamma_h);

/// Dispatch on the truncation kind with a precomputed forward image u = Az.
Mask build_mask(const TruncationKind& kind, const ComplexVector& forward, double z_norm,
                const RealVector& y);
Mask build_mask(const TruncationKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                const RealVector& y);

/// Zero-weighted view of a problem: dropped rows carry weight 0 and y = 0.
struct MaskedView {
  const MeasurementOperator* op = nullptr;
  RealVector y;
  RealVector weights;
};

MaskedView apply_mask(const MeasurementOperator& op, const RealVector& y, const Mask& mask);

}  // namespace rkwf
