#include "rkwf/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rkwf {

bool is_success(const TrialRecord& r, double threshold, ThresholdMode mode) {
  if (r.aborted) return false;
  const double v = mode == ThresholdMode::Absolute ? r.dist : r.rel_err;
  return v < threshold;
}

double are(std::span<const TrialRecord> records, double cap) {
  if (records.empty()) throw std::invalid_argument("are: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += std::isfinite(r.rel_err) ? std::min(r.rel_err, cap) : cap;
  return sum / static_cast<double>(records.size());
}

double success_probability(std::span<const TrialRecord> records, double threshold,
                           ThresholdMode mode) {
  if (records.empty()) throw std::invalid_argument("success_probability: no records");
  std::size_t ok = 0;
  for (const auto& r : records) ok += is_success(r, threshold, mode) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

namespace {

double population_variance(const RealVector& v) {
  if (v.size() == 0) return 0.0;
  return (v.array() - v.mean()).square().mean();
}

}  // namespace

double snr_db(const RealVector& y_clean, const RealVector& w) {
  const double var_w = population_variance(w);
  if (!(var_w > 0.0)) throw std::invalid_argument("snr_db: noise variance is zero");
  return 20.0 * std::log10(std::sqrt(population_variance(y_clean) / var_w));
}

double correlation(const ComplexVector& x, const ComplexVector& reconstruction) {
  if (x.size() != reconstruction.size()) throw std::invalid_argument("correlation: length mismatch");
  const double nx = x.norm();
  const double nr = reconstruction.norm();
  if (!(nr > 0.0)) throw std::invalid_argument("correlation: zero-norm reconstruction");
  if (!(nx > 0.0)) throw std::invalid_argument("correlation: zero-norm ground truth");
  return std::abs(x.dot(reconstruction)) / (nx * nr);
}

double acc(const ComplexVector& x, std::span<const ComplexVector> reconstructions) {
  if (reconstructions.empty()) throw std::invalid_argument("acc: no reconstructions");
  double sum = 0.0;
  for (const auto& r : reconstructions) sum += correlation(x, r);
  return sum / static_cast<double>(reconstructions.size());
}

double acc_over_images(std::span<const double> per_image) {
  if (per_image.empty()) throw std::invalid_argument("acc_over_images: no images");
  double sum = 0.0;
  for (double v : per_image) sum += v;
  return sum / static_cast<double>(per_image.size());
}

}  // namespace rkwf
