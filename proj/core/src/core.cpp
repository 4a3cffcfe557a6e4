#include "rkwf/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rkwf {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection on the top of the range keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

namespace {

void require_same_length(const ComplexVector& x, const ComplexVector& z) {
  if (x.size() != z.size()) {
    throw std::invalid_argument("length mismatch: " + std::to_string(x.size()) + " vs " +
                                std::to_string(z.size()));
  }
}

}  // namespace

ComplexVector align_phase(const ComplexVector& x, const ComplexVector& z) {
  require_same_length(x, z);
  const Complex inner = x.dot(z);  // x^H z
  const double mag = std::abs(inner);
  if (mag == 0.0) return z;
  return z * (std::conj(inner) / mag);
}

double dist_up_to_phase(const ComplexVector& x, const ComplexVector& z) {
  return (x - align_phase(x, z)).norm();
}

double relative_error(const ComplexVector& x, const ComplexVector& z) {
  const double nx = x.norm();
  if (nx == 0.0) throw std::invalid_argument("relative_error: ground truth has zero norm");
  return dist_up_to_phase(x, z) / nx;
}

namespace {

struct PowerState {
  ComplexVector v;
  double value = 0.0;
  double image_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Power iteration on (apply + shift I). When stop_on_negative is set the loop
// exits early once the Rayleigh quotient is negative and the image norm has
// settled, since the caller is going to shift anyway.
PowerState power_iterate(const HermitianApply& apply, ComplexVector v, double shift,
                         const PowerIterationOptions& options, bool stop_on_negative) {
  PowerState st;
  double previous_norm = -1.0;
  for (int it = 0; it < options.max_iters; ++it) {
    ComplexVector w = apply(v);
    if (shift != 0.0) w += shift * v;
    const double lambda_shifted = v.dot(w).real();
    const double lambda = lambda_shifted - shift;
    const double residual = (w - lambda_shifted * v).norm();
    const double wn = w.norm();
    st.v = v;
    st.value = lambda;
    st.image_norm = wn;
    st.iterations = it + 1;
    if (residual <= options.tol * std::abs(lambda)) {
      st.converged = true;
      return st;
    }
    if (wn == 0.0) return st;  // v lies in the null space of the shifted operator
    if (stop_on_negative && lambda < 0.0 && previous_norm > 0.0 &&
        std::abs(wn - previous_norm) <= 1e-3 * wn) {
      return st;
    }
    previous_norm = wn;
    v = w / wn;
  }
  return st;
}

}  // namespace

EigenResult leading_eigvec(const HermitianApply& apply, Eigen::Index n, Rng& rng,
                           const PowerIterationOptions& options) {
  if (n < 1) throw std::invalid_argument("leading_eigvec: dimension must be >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("leading_eigvec: tol must be > 0");
  if (options.max_iters < 1) throw std::invalid_argument("leading_eigvec: max_iters must be >= 1");

  ComplexVector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = rng.complex_normal();
  start.normalize();

  PowerState first = power_iterate(apply, start, 0.0, options, /*stop_on_negative=*/true);
  EigenResult out;
  if (first.value >= 0.0 && (first.converged || first.iterations == options.max_iters)) {
    out.vector = first.v;
    out.value = first.value;
    out.iterations = first.iterations;
    out.converged = first.converged;
    return out;
  }

  // The dominant eigenvalue is negative: shift by the spectral norm estimate so
  // the whole spectrum is nonnegative and the top eigenvalue becomes dominant.
  const double shift = first.image_norm;
  PowerState second = power_iterate(apply, start, shift, options, false);
  out.vector = second.v;
  out.value = second.value;
  out.iterations = first.iterations + second.iterations;
  out.converged = second.converged;
  return out;
}

}  // namespace rkwf
