#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rkwf/core.hpp"

namespace rkwf {

struct TrialRecord {
  std::string algorithm;
  std::string sweep_var;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double dist = 0.0;
  double rel_err = 0.0;
  double acc = 0.0;
  int iterations = 0;
  bool success = false;
  bool aborted = false;
  double wall_ms = 0.0;
};

enum class ThresholdMode { Absolute, Relative };

/// True when the trial did not abort and dist (or rel_err, in relative mode)
/// is strictly below the threshold.
bool is_success(const TrialRecord& r, double threshold, ThresholdMode mode = ThresholdMode::Absolute);

/// Mean relative error. Each term is min(rel_err, cap); non-finite errors count
/// as the cap. Throws on empty input.
double are(std::span<const TrialRecord> records,
           double cap = std::numeric_limits<double>::infinity());

/// Fraction of successful trials. Throws on empty input.
double success_probability(std::span<const TrialRecord> records, double threshold = 1e-5,
                           ThresholdMode mode = ThresholdMode::Absolute);

/// 20 log10 sqrt(var(y_clean) / var(w)) with population variances.
double snr_db(const RealVector& y_clean, const RealVector& w);

/// |<x, xhat / ||xhat||>| / ||x||: correlation of one reconstruction.
double correlation(const ComplexVector& x, const ComplexVector& reconstruction);

/// Mean correlation of the reconstructions of one image.
double acc(const ComplexVector& x, std::span<const ComplexVector> reconstructions);

/// Mean of per-image average correlations.
double acc_over_images(std::span<const double> per_image);

}  // namespace rkwf
