#include "rkwf/io/array_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rkwf::io {

static_assert(std::endian::native == std::endian::little, "array files assume a little-endian host");

std::string to_string(ArrayFileError::Kind kind) {
  using K = ArrayFileError::Kind;
  switch (kind) {
    case K::BadMagic: return "bad_magic";
    case K::UnsupportedVersion: return "unsupported_version";
    case K::UnsupportedDtype: return "unsupported_dtype";
    case K::TruncatedPayload: return "truncated_payload";
    case K::Io: return "io";
  }
  return "unknown";
}

namespace {

constexpr char kMagic[4] = {'R', 'K', 'P', 'H'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T)) {
    throw ArrayFileError(ArrayFileError::Kind::TruncatedPayload, "array file: header truncated");
  }
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::uint64_t element_count(const std::vector<std::uint64_t>& dims) {
  std::uint64_t count = 1;
  for (auto d : dims) {
    if (d != 0 && count > UINT64_MAX / d) {
      throw ArrayFileError(ArrayFileError::Kind::TruncatedPayload, "array file: dims overflow");
    }
    count *= d;
  }
  return count;
}

}  // namespace

std::vector<std::uint8_t> encode(const ComplexArray& array) {
  if (array.dims.size() > 255) throw std::invalid_argument("array file: rank exceeds 255");
  if (element_count(array.dims) != array.data.size()) {
    throw std::invalid_argument("array file: data length does not match dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 * array.dims.size() + 16 * array.data.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put<std::uint16_t>(out, kArrayFileVersion);
  put<std::uint8_t>(out, kDtypeComplex128);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(array.dims.size()));
  for (auto d : array.dims) put<std::uint64_t>(out, d);
  for (const auto& c : array.data) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  return out;
}

ComplexArray decode(const std::vector<std::uint8_t>& bytes) {
  using K = ArrayFileError::Kind;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ArrayFileError(K::BadMagic, "array file: bad magic (expected RKPH)");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint16_t>(bytes, pos);
  if (version != kArrayFileVersion) {
    throw ArrayFileError(K::UnsupportedVersion, "array file: unsupported version " + std::to_string(version));
  }
  const auto dtype = get<std::uint8_t>(bytes, pos);
  if (dtype != kDtypeComplex128) {
    throw ArrayFileError(K::UnsupportedDtype, "array file: unsupported dtype " + std::to_string(dtype));
  }
  const auto rank = get<std::uint8_t>(bytes, pos);
  ComplexArray a;
  a.dims.resize(rank);
  for (auto& d : a.dims) d = get<std::uint64_t>(bytes, pos);
  const std::uint64_t count = element_count(a.dims);
  const std::uint64_t remaining = bytes.size() - pos;
  if (count > remaining / 16 || remaining != 16 * count) {
    throw ArrayFileError(K::TruncatedPayload, "array file: payload has " + std::to_string(remaining) +
                                                  " bytes, expected " + std::to_string(16 * count));
  }
  a.data.resize(count);
  for (auto& c : a.data) {
    const double re = get<double>(bytes, pos);
    const double im = get<double>(bytes, pos);
    c = {re, im};
  }
  return a;
}

void write_array(const std::filesystem::path& path, const ComplexArray& array) {
  const auto bytes = encode(array);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "write failed: " + path.string());
}

ComplexArray read_array(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArrayFileError(ArrayFileError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const ArrayFileError& e) {
    throw ArrayFileError(e.kind(), path.string() + ": " + e.what());
  }
}

ComplexArray from_matrix(const ComplexMatrix& m) {
  ComplexArray a;
  a.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  a.data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.data.push_back(m(i, j));
  return a;
}

ComplexArray from_vector(const ComplexVector& v) {
  ComplexArray a;
  a.dims = {static_cast<std::uint64_t>(v.size())};
  a.data.assign(v.data(), v.data() + v.size());
  return a;
}

ComplexArray from_real_vector(const RealVector& v) {
  ComplexArray a;
  a.dims = {static_cast<std::uint64_t>(v.size())};
  a.data.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) a.data.emplace_back(v[i], 0.0);
  return a;
}

ComplexMatrix to_matrix(const ComplexArray& a) {
  if (a.dims.size() != 2) throw std::invalid_argument("expected a rank-2 array, got rank " + std::to_string(a.dims.size()));
  const auto rows = static_cast<Eigen::Index>(a.dims[0]);
  const auto cols = static_cast<Eigen::Index>(a.dims[1]);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = a.data[static_cast<std::size_t>(i * cols + j)];
  return m;
}

ComplexVector to_vector(const ComplexArray& a) {
  const bool ok = a.dims.size() == 1 || (a.dims.size() == 2 && (a.dims[0] == 1 || a.dims[1] == 1));
  if (!ok) throw std::invalid_argument("expected a vector-shaped array");
  ComplexVector v(static_cast<Eigen::Index>(a.data.size()));
  for (std::size_t i = 0; i < a.data.size(); ++i) v[static_cast<Eigen::Index>(i)] = a.data[i];
  return v;
}

RealVector to_real_vector(const ComplexArray& a) {
  const ComplexVector v = to_vector(a);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i].imag() != 0.0) throw std::invalid_argument("expected a real array, entry " + std::to_string(i) + " has a nonzero imaginary part");
  return v.real();
}

}  // namespace rkwf::io
