#include "mvcorr/io.hpp"

#include <cstring>
#include <istream>
#include <ostream>

#include "mvcorr/errors.hpp"

namespace mvcorr {

namespace {

template <typename U>
void write_le(std::ostream& out, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<unsigned char>(v >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U read_le(std::istream& in) {
  unsigned char buf[sizeof(U)];
  in.read(reinterpret_cast<char*>(buf), sizeof(U));
  if (!in) throw IoError("truncated payload");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(buf[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void BinaryWriter::u8(std::uint8_t v) { write_le<std::uint8_t>(out_, v); }
void BinaryWriter::u32(std::uint32_t v) { write_le<std::uint32_t>(out_, v); }
void BinaryWriter::u64(std::uint64_t v) { write_le<std::uint64_t>(out_, v); }
void BinaryWriter::i32(std::int32_t v) { write_le<std::uint32_t>(out_, static_cast<std::uint32_t>(v)); }

void BinaryWriter::f32(float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  u32(bits);
}

void BinaryWriter::f64(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  u64(bits);
}

void BinaryWriter::bytes(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

void BinaryWriter::matrix_f64(const Matrix& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) f64(m(i, j));
  }
}

void BinaryWriter::vector_f64(const Vector& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) f64(v[i]);
}

void BinaryWriter::matrix_rows_f32(const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) f32(static_cast<float>(m(i, j)));
  }
}

std::uint8_t BinaryReader::u8() { return read_le<std::uint8_t>(in_); }
std::uint32_t BinaryReader::u32() { return read_le<std::uint32_t>(in_); }
std::uint64_t BinaryReader::u64() { return read_le<std::uint64_t>(in_); }
std::int32_t BinaryReader::i32() { return static_cast<std::int32_t>(read_le<std::uint32_t>(in_)); }

float BinaryReader::f32() {
  std::uint32_t bits = u32();
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

double BinaryReader::f64() {
  std::uint64_t bits = u64();
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void BinaryReader::bytes(void* data, std::size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in_) throw IoError("truncated payload");
}

std::string BinaryReader::str() {
  const std::uint64_t n = u64();
  if (n > (1ull << 32)) throw IoError("implausible string length");
  std::string s(n, '\0');
  if (n > 0) bytes(s.data(), n);
  return s;
}

Matrix BinaryReader::matrix_f64() {
  const auto rows = static_cast<Index>(u64());
  const auto cols = static_cast<Index>(u64());
  if (rows < 0 || cols < 0 || (rows > 0 && cols > (1 << 26) / std::max<Index>(rows, 1) * 64)) {
    throw IoError("implausible matrix dimensions");
  }
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = f64();
  }
  return m;
}

Vector BinaryReader::vector_f64() {
  const auto n = static_cast<Index>(u64());
  if (n < 0) throw IoError("implausible vector length");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = f64();
  return v;
}

Matrix BinaryReader::matrix_rows_f32(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<double>(f32());
  }
  return m;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace mvcorr
