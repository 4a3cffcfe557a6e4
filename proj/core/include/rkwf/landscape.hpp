#pragma once

#include "rkwf/losses.hpp"
#include "rkwf/models.hpp"

namespace rkwf {

/// Rectangular grid over real z = (u, v) in R^2.
struct GridSpec {
  double u_min = -2.0;
  double u_max = 2.0;
  double v_min = -2.0;
  double v_max = 2.0;
  Eigen::Index u_points = 101;
  Eigen::Index v_points = 101;

  void validate() const;
  double u(Eigen::Index i) const;
  double v(Eigen::Index j) const;
};

/// Loss (1/M normalized) on the grid; entry (i, j) is the loss at (u_i, v_j).
/// The operator must have N = 2.
RealMatrix loss_surface_grid(const MeasurementOperator& op, const RealVector& y,
                             const LossKind& loss, const GridSpec& grid);

}  // namespace rkwf
