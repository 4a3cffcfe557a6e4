#include "rkwf/landscape.hpp"

#include <stdexcept>

namespace rkwf {

void GridSpec::validate() const {
  if (u_points < 1 || v_points < 1) throw std::invalid_argument("grid: point counts must be >= 1");
  if (!(u_max >= u_min) || !(v_max >= v_min)) throw std::invalid_argument("grid: empty range");
}

double GridSpec::u(Eigen::Index i) const {
  if (u_points == 1) return u_min;
  return u_min + (u_max - u_min) * static_cast<double>(i) / static_cast<double>(u_points - 1);
}

double GridSpec::v(Eigen::Index j) const {
  if (v_points == 1) return v_min;
  return v_min + (v_max - v_min) * static_cast<double>(j) / static_cast<double>(v_points - 1);
}

RealMatrix loss_surface_grid(const MeasurementOperator& op, const RealVector& y,
                             const LossKind& loss, const GridSpec& grid) {
  if (op.cols() != 2) {
    throw std::invalid_argument("loss_surface_grid: needs N = 2, got N = " + std::to_string(op.cols()));
  }
  if (y.size() != op.rows()) throw std::invalid_argument("loss_surface_grid: y length does not match M");
  loss.validate();
  grid.validate();
  LossOptions opts;
  opts.normalize_by_m = true;
  RealMatrix out(grid.u_points, grid.v_points);
  ComplexVector z(2);
  for (Eigen::Index i = 0; i < grid.u_points; ++i)
    for (Eigen::Index j = 0; j < grid.v_points; ++j) {
      z << Complex(grid.u(i), 0.0), Complex(grid.v(j), 0.0);
      out(i, j) = loss_value(loss, z, op, y, opts);
    }
  return out;
}

}  // namespace rkwf
