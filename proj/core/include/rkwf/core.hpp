#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>

namespace rkwf {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// SplitMix64 finalizer. Used for seed derivation and for expanding a 64-bit
/// seed into generator state.
std::uint64_t mix64(std::uint64_t x);

/// Combines a seed with an ordered list of keys into a new 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

/// Deterministic random source.
///
/// The bit generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Distributions are implemented here rather than taken from
/// <random>, because the standard library distributions are not specified
/// bit-for-bit and differ between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&&) = default;
  Rng& operator=(Rng&&) = default;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

  /// Circularly-symmetric complex normal with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Phase-invariant Euclidean distance: min over phi of ||x e^{i phi} - z||.
///
/// The optimal phase is the argument of <x, z> = x^H z. The distance is then
/// evaluated directly on the aligned difference, which stays accurate when x
/// and z agree to near machine precision (the expanded form
/// ||x||^2 + ||z||^2 - 2|<x,z>| cancels catastrophically there).
double dist_up_to_phase(const ComplexVector& x, const ComplexVector& z);

/// dist_up_to_phase(x, z) / ||x||. Throws std::invalid_argument for x = 0.
double relative_error(const ComplexVector& x, const ComplexVector& z);

/// Returns e^{i phi} * z with phi chosen so that <x, result> is real and >= 0.
ComplexVector align_phase(const ComplexVector& x, const ComplexVector& z);

using HermitianApply = std::function<ComplexVector(const ComplexVector&)>;

struct EigenResult {
  ComplexVector vector;  // unit norm, defined up to a global phase
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  int max_iters = 2000;
  double tol = 1e-9;
};

/// Eigenpair with the algebraically largest eigenvalue of a Hermitian operator.
///
/// Plain power iteration converges to the eigenvalue of largest magnitude. When
/// that one is negative the iteration is repeated on the shifted operator
/// M + |lambda| I, whose spectrum is nonnegative and whose dominant eigenvector
/// is the top eigenvector of M. Convergence is declared when
/// ||M v - lambda v|| <= tol * |lambda|. Hitting max_iters is not an error: the
/// last iterate is returned with converged = false.
EigenResult leading_eigvec(const HermitianApply& apply, Eigen::Index n, Rng& rng,
                           const PowerIterationOptions& options = {});

}  // namespace rkwf
