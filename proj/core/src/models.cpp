#include "rkwf/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace rkwf {

namespace {

// Eigen's FFT caches twiddle tables inside the object, so each thread keeps its
// own instance.
Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

}  // namespace

MeasurementOperator::MeasurementOperator(std::variant<Dense, Cdp> storage)
    : storage_(std::move(storage)) {
  if (const auto* d = std::get_if<Dense>(&storage_)) {
    rows_ = d->matrix.rows();
    cols_ = d->matrix.cols();
    row_norms_sq_ = d->matrix.rowwise().squaredNorm();
  } else {
    const auto& c = std::get<Cdp>(storage_);
    const Eigen::Index l = c.patterns.rows();
    cols_ = c.patterns.cols();
    rows_ = l * cols_;
    row_norms_sq_.resize(rows_);
    const RealVector per_pattern = c.patterns.rowwise().squaredNorm();
    for (Eigen::Index p = 0; p < l; ++p) row_norms_sq_.segment(p * cols_, cols_).setConstant(per_pattern[p]);
  }
  if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("operator must have M >= 1 and N >= 1");
  if (!row_norms_sq_.allFinite()) throw std::invalid_argument("operator has non-finite entries");
}

MeasurementOperator MeasurementOperator::dense(ComplexMatrix matrix) {
  return MeasurementOperator(Dense{std::move(matrix)});
}

MeasurementOperator MeasurementOperator::cdp(ComplexMatrix patterns) {
  return MeasurementOperator(Cdp{std::move(patterns)});
}

const ComplexMatrix& MeasurementOperator::dense_matrix() const {
  if (!is_dense()) throw std::logic_error("operator is not dense");
  return std::get<Dense>(storage_).matrix;
}

const ComplexMatrix& MeasurementOperator::cdp_patterns() const {
  if (!is_cdp()) throw std::logic_error("operator is not a CDP operator");
  return std::get<Cdp>(storage_).patterns;
}

Eigen::Index MeasurementOperator::pattern_count() const {
  return is_cdp() ? cdp_patterns().rows() : 0;
}

ComplexVector MeasurementOperator::apply(const ComplexVector& z) const {
  if (z.size() != cols_) {
    throw std::invalid_argument("apply: expected vector of length " + std::to_string(cols_) +
                                ", got " + std::to_string(z.size()));
  }
  if (const auto* d = std::get_if<Dense>(&storage_)) return d->matrix * z;

  const auto& patterns = std::get<Cdp>(storage_).patterns;
  auto& fft = thread_fft();
  ComplexVector out(rows_);
  ComplexVector modulated(cols_);
  ComplexVector spectrum(cols_);
  for (Eigen::Index l = 0; l < patterns.rows(); ++l) {
    modulated = z.cwiseProduct(patterns.row(l).transpose());
    // kissfft cannot plan a length-1 transform; that DFT is the identity.
    if (cols_ == 1) spectrum = modulated;
    else fft.fwd(spectrum, modulated);
    out.segment(l * cols_, cols_) = spectrum;
  }
  return out;
}

ComplexVector MeasurementOperator::adjoint_apply(const ComplexVector& u) const {
  if (u.size() != rows_) {
    throw std::invalid_argument("adjoint_apply: expected vector of length " +
                                std::to_string(rows_) + ", got " + std::to_string(u.size()));
  }
  if (const auto* d = std::get_if<Dense>(&storage_)) return d->matrix.adjoint() * u;

  // A^* u = sum_l conj(d_l) . (N * IDFT(u_l)), i.e. an unscaled inverse transform.
  const auto& patterns = std::get<Cdp>(storage_).patterns;
  auto& fft = thread_fft();
  ComplexVector out = ComplexVector::Zero(cols_);
  ComplexVector block(cols_);
  ComplexVector back(cols_);
  for (Eigen::Index l = 0; l < patterns.rows(); ++l) {
    block = u.segment(l * cols_, cols_);
    if (cols_ == 1) back = block;
    else fft.inv(back, block);
    out += patterns.row(l).adjoint().cwiseProduct(back);
  }
  return out;
}

ComplexMatrix MeasurementOperator::to_dense() const {
  if (const auto* d = std::get_if<Dense>(&storage_)) return d->matrix;
  const auto& patterns = std::get<Cdp>(storage_).patterns;
  const Eigen::Index n = cols_;
  ComplexMatrix out(rows_, n);
  for (Eigen::Index l = 0; l < patterns.rows(); ++l) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        // Reduce k*j mod n first so the twiddle angle stays small.
        const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                             static_cast<double>(n);
        out(l * n + k, j) = patterns(l, j) * std::polar(1.0, angle);
      }
    }
  }
  return out;
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::Gaussian ? "gaussian" : "cdp";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "gaussian") return ModelKind::Gaussian;
  if (name == "cdp") return ModelKind::Cdp;
  throw std::invalid_argument("unknown model kind '" + name + "' (expected gaussian|cdp)");
}

void CorruptionSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be >= 0");
  if (!(rho >= 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
}

void ProblemInstance::validate() const {
  if (y.size() != op.rows()) {
    throw std::invalid_argument("y has length " + std::to_string(y.size()) + " but operator has " +
                                std::to_string(op.rows()) + " rows");
  }
  if ((y.array() < 0.0).any() || !y.allFinite()) {
    throw std::invalid_argument("y must be finite and nonnegative");
  }
  if (x_true && x_true->size() != op.cols()) {
    throw std::invalid_argument("x_true has length " + std::to_string(x_true->size()) +
                                " but operator has " + std::to_string(op.cols()) + " columns");
  }
}

MeasurementOperator sample_gaussian(Eigen::Index m, Eigen::Index n, Rng& rng) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample_gaussian: M and N must be >= 1");
  ComplexMatrix a(m, n);
  // Row-major fill order so that a prefix of rows does not depend on M.
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.complex_normal(1.0);
  return MeasurementOperator::dense(std::move(a));
}

Complex sample_octanary(Rng& rng) {
  static constexpr Complex kUnits[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  const Complex b1 = kUnits[rng.below(4)];
  const double b2 = rng.uniform() < 0.8 ? std::sqrt(2.0) / 2.0 : std::sqrt(3.0);
  return b1 * b2;
}

MeasurementOperator sample_cdp(Eigen::Index n, Eigen::Index l, Rng& rng) {
  if (n < 1 || l < 1) throw std::invalid_argument("sample_cdp: N and L must be >= 1");
  ComplexMatrix patterns(l, n);
  for (Eigen::Index p = 0; p < l; ++p)
    for (Eigen::Index j = 0; j < n; ++j) patterns(p, j) = sample_octanary(rng);
  return MeasurementOperator::cdp(std::move(patterns));
}

RealVector forward_intensity(const MeasurementOperator& op, const ComplexVector& z) {
  return op.apply(z).cwiseAbs2();
}

Eigen::Index outlier_count(double rho, Eigen::Index m) {
  // The small slack absorbs representation error such as 0.29 * 100 = 28.999...
  return static_cast<Eigen::Index>(std::floor(rho * static_cast<double>(m) + 1e-9));
}

Corruption corrupt(const RealVector& y_clean, double x_norm_sq, const CorruptionSpec& spec,
                   Rng& rng) {
  spec.validate();
  const Eigen::Index m = y_clean.size();
  if ((y_clean.array() < 0.0).any()) throw std::invalid_argument("corrupt: y_clean must be >= 0");
  if ((spec.sigma > 0.0 || spec.theta > 0.0) && !(x_norm_sq > 0.0)) {
    throw std::invalid_argument("corrupt: ||x||^2 must be positive when sigma or theta > 0");
  }
  const Eigen::Index count = outlier_count(spec.rho, m);
  if (count >= m && m > 0 && spec.rho > 0.0) {
    throw std::invalid_argument("corrupt: outlier count would cover every measurement");
  }

  Corruption out;
  out.noise = RealVector::Zero(m);
  out.outliers = RealVector::Zero(m);

  if (spec.sigma > 0.0) {
    const double w_max = spec.sigma * x_norm_sq;
    for (Eigen::Index i = 0; i < m; ++i) out.noise[i] = rng.uniform(0.0, w_max);
  }

  if (count > 0) {
    // Partial Fisher-Yates: the first `count` slots become the support.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    out.outlier_support.assign(idx.begin(), idx.begin() + count);
    std::sort(out.outlier_support.begin(), out.outlier_support.end());
    const double eta_max = spec.theta * x_norm_sq;
    for (Eigen::Index s : out.outlier_support) {
      double v = rng.uniform(0.0, eta_max);
      if (spec.signed_outliers && rng.uniform() < 0.5) v = -v;
      out.outliers[s] = v;
    }
  }

  out.y = (y_clean + out.outliers + out.noise).cwiseMax(0.0);
  return out;
}

}  // namespace rkwf
