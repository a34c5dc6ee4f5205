#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mvcorr/linalg.hpp"

namespace mvcorr {

/// Little-endian binary writer over a stream.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v);
  void f32(float v);
  void f64(double v);
  void bytes(const void* data, std::size_t n);
  void str(const std::string& s);        // u64 length + bytes
  void matrix_f64(const Matrix& m);      // u64 rows, u64 cols, column-major f64
  void vector_f64(const Vector& v);
  void matrix_rows_f32(const Matrix& m); // row-major f32 payload, dims NOT written

 private:
  std::ostream& out_;
};

/// Little-endian binary reader; throws IoError on truncated input.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32();
  float f32();
  double f64();
  void bytes(void* data, std::size_t n);
  std::string str();
  Matrix matrix_f64();
  Vector vector_f64();
  Matrix matrix_rows_f32(Index rows, Index cols);

 private:
  std::istream& in_;
};

/// FNV-1a 64-bit over a byte range; used to fingerprint training data.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace mvcorr
