#include "rkwf/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rkwf {

void TruncationKind::validate() const {
  switch (type) {
    case TruncationType::None:
      return;
    case TruncationType::MeanResidual:
      if (!(gamma_e > 0.0)) throw std::invalid_argument("gamma_e must be > 0");
      return;
    case TruncationType::MedianResidual:
      if (!(gamma_e > 0.0)) throw std::invalid_argument("gamma_e must be > 0");
      if (!(gamma_ub > 0.0)) throw std::invalid_argument("gamma_ub must be > 0");
      return;
    case TruncationType::OneSidedLog:
      if (!(gamma_h > 0.0)) throw std::invalid_argument("gamma_h must be > 0");
      return;
  }
}

std::string to_string(TruncationType type) {
  switch (type) {
    case TruncationType::None: return "none";
    case TruncationType::MeanResidual: return "mean";
    case TruncationType::MedianResidual: return "median";
    case TruncationType::OneSidedLog: return "one-sided-log";
  }
  return "unknown";
}

TruncationType truncation_type_from_string(const std::string& name) {
  if (name == "none") return TruncationType::None;
  if (name == "mean") return TruncationType::MeanResidual;
  if (name == "median") return TruncationType::MedianResidual;
  if (name == "one-sided-log") return TruncationType::OneSidedLog;
  throw std::invalid_argument("unknown truncation '" + name +
                              "' (expected none|mean|median|one-sided-log)");
}

RealVector Mask::weights() const {
  RealVector w(size());
  for (Eigen::Index m = 0; m < size(); ++m) w[m] = kept(m) ? 1.0 : 0.0;
  return w;
}

Mask Mask::all(Eigen::Index m) {
  Mask mask;
  mask.keep.assign(static_cast<std::size_t>(m), 1);
  mask.kept_count = m;
  return mask;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = v.size();
  const std::size_t hi = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi), v.end());
  const double upper = v[hi];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi));
  if (std::isinf(lower) && std::isinf(upper) && lower != upper) return 0.0;
  if (lower == upper) return lower;
  return 0.5 * (lower + upper);
}

namespace {

// Fills kept_count; if nothing survived, keeps the ceil(M/2) indices with the
// smallest score (ties broken by index).
Mask finalize(std::vector<std::uint8_t> keep, const std::vector<double>& score) {
  Mask mask;
  mask.keep = std::move(keep);
  mask.kept_count = std::count(mask.keep.begin(), mask.keep.end(), std::uint8_t{1});
  if (mask.kept_count > 0 || mask.keep.empty()) return mask;

  const std::size_t m = mask.keep.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  const std::size_t take = (m + 1) / 2;
  for (std::size_t i = 0; i < take; ++i) mask.keep[order[i]] = 1;
  mask.kept_count = static_cast<Eigen::Index>(take);
  mask.fallback = true;
  return mask;
}

std::vector<double> abs_residuals(const ComplexVector& u, const RealVector& y) {
  std::vector<double> r(static_cast<std::size_t>(u.size()));
  for (Eigen::Index m = 0; m < u.size(); ++m) r[static_cast<std::size_t>(m)] = std::abs(y[m] - std::norm(u[m]));
  return r;
}

void check_lengths(const ComplexVector& u, const RealVector& y) {
  if (u.size() != y.size()) {
    throw std::invalid_argument("mask: y has length " + std::to_string(y.size()) + ", expected " +
                                std::to_string(u.size()));
  }
}

Mask mean_mask(const ComplexVector& u, const RealVector& y, double gamma_e) {
  check_lengths(u, y);
  const auto resid = abs_residuals(u, y);
  const double mean = std::accumulate(resid.begin(), resid.end(), 0.0) / static_cast<double>(resid.size());
  const double bound = gamma_e * mean;
  std::vector<std::uint8_t> keep(resid.size());
  for (std::size_t m = 0; m < resid.size(); ++m) keep[m] = resid[m] <= bound;
  return finalize(std::move(keep), resid);
}

Mask median_mask(const ComplexVector& u, double z_norm, const RealVector& y, double gamma_ub,
                 double gamma_e) {
  check_lengths(u, y);
  if (!(z_norm > 0.0)) throw std::invalid_argument("median_residual_mask: z must be nonzero");
  const auto resid = abs_residuals(u, y);
  const double level = median(resid);
  std::vector<std::uint8_t> keep(resid.size());
  for (std::size_t m = 0; m < resid.size(); ++m) {
    const double ratio = std::abs(u[static_cast<Eigen::Index>(m)]) / z_norm;
    keep[m] = ratio <= gamma_ub && resid[m] <= gamma_e * level * ratio;
  }
  return finalize(std::move(keep), resid);
}

Mask one_sided_mask(const ComplexVector& u, const RealVector& y, double gamma_h) {
  check_lengths(u, y);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> r(static_cast<std::size_t>(u.size()));
  for (Eigen::Index m = 0; m < u.size(); ++m) {
    const double q = std::norm(u[m]);
    const double ym = y[m];
    double v;
    if (ym == 0.0 && q == 0.0) v = 0.0;
    else if (ym == 0.0) v = -inf;
    else if (q == 0.0) v = inf;
    else v = std::log(ym) - std::log(q);
    r[static_cast<std::size_t>(m)] = v;
  }
  const double threshold = gamma_h * median(r);
  std::vector<std::uint8_t> keep(r.size());
  for (std::size_t m = 0; m < r.size(); ++m) keep[m] = r[m] == -inf || r[m] <= threshold;
  return finalize(std::move(keep), r);
}

}  // namespace

Mask build_mask(const TruncationKind& kind, const ComplexVector& forward, double z_norm,
                const RealVector& y) {
  kind.validate();
  switch (kind.type) {
    case TruncationType::None: return Mask::all(forward.size());
    case TruncationType::MeanResidual: return mean_mask(forward, y, kind.gamma_e);
    case TruncationType::MedianResidual:
      return median_mask(forward, z_norm, y, kind.gamma_ub, kind.gamma_e);
    case TruncationType::OneSidedLog: return one_sided_mask(forward, y, kind.gamma_h);
  }
  throw std::logic_error("unhandled truncation type");
}

Mask build_mask(const TruncationKind& kind, const ComplexVector& z, const MeasurementOperator& op,
                const RealVector& y) {
  return build_mask(kind, op.apply(z), z.norm(), y);
}

Mask mean_residual_mask(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double gamma_e) {
  return build_mask(TruncationKind::mean_residual(gamma_e), z, op, y);
}

Mask median_residual_mask(const ComplexVector& z, const MeasurementOperator& op,
                          const RealVector& y, double gamma_ub, double gamma_e) {
  return build_mask(TruncationKind::median_residual(gamma_ub, gamma_e), z, op, y);
}

Mask one_sided_log_mask(const ComplexVector& z, const MeasurementOperator& op, const RealVector& y,
                        double gamma_h) {
  return build_mask(TruncationKind::one_sided_log(gamma_h), z, op, y);
}

MaskedView apply_mask(const MeasurementOperator& op, const RealVector& y, const Mask& mask) {
  if (mask.size() != op.rows() || y.size() != op.rows()) {
    throw std::invalid_argument("apply_mask: mask, y and operator rows must agree");
  }
  if (mask.kept_count == 0) {
    throw std::invalid_argument("apply_mask: empty mask (builders apply the minimum-keep rule)");
  }
  MaskedView view;
  view.op = &op;
  view.weights = mask.weights();
  view.y = y.cwiseProduct(view.weights);
  return view;
}

}  // namespace rkwf
