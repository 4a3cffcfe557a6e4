#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkwf/core.hpp"

namespace rkwf::io {

/// Binary complex array container.
///
///   offset 0   "RKPH"
///   offset 4   u16 version (1)
///   offset 6   u8 dtype (1 = complex128)
///   offset 7   u8 rank
///   offset 8   rank x u64 dims
///   then       prod(dims) x (f64 re, f64 im), row-major
///
/// All integers and floats are little-endian.
inline constexpr std::uint16_t kArrayFileVersion = 1;
inline constexpr std::uint8_t kDtypeComplex128 = 1;

class ArrayFileError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, UnsupportedVersion, UnsupportedDtype, TruncatedPayload, Io };

  ArrayFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string to_string(ArrayFileError::Kind kind);

struct ComplexArray {
  std::vector<std::uint64_t> dims;
  std::vector<Complex> data;  // row-major
};

std::vector<std::uint8_t> encode(const ComplexArray& array);
ComplexArray decode(const std::vector<std::uint8_t>& bytes);

void write_array(const std::filesystem::path& path, const ComplexArray& array);
ComplexArray read_array(const std::filesystem::path& path);

ComplexArray from_matrix(const ComplexMatrix& m);
ComplexArray from_vector(const ComplexVector& v);
ComplexArray from_real_vector(const RealVector& v);

/// Rank-2 arrays only.
ComplexMatrix to_matrix(const ComplexArray& a);
/// Rank-1 arrays, or rank-2 with one dimension equal to 1.
ComplexVector to_vector(const ComplexArray& a);
/// As to_vector; throws if any imaginary part is nonzero.
RealVector to_real_vector(const ComplexArray& a);

}  // namespace rkwf::io
