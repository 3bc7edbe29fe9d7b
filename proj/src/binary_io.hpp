#pragma once

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "chaosgan/error.hpp"

namespace chaosgan::detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_uint(std::istream& in, int bytes, const char* what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), bytes);
  if (in.gcount() != bytes) throw FormatError(std::string("truncated file while reading ") + what);
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
  return static_cast<std::uint32_t>(get_uint(in, 4, what));
}
inline std::uint64_t get_u64(std::istream& in, const char* what) { return get_uint(in, 8, what); }
inline double get_f64(std::istream& in, const char* what) {
  return std::bit_cast<double>(get_uint(in, 8, what));
}

}  // namespace chaosgan::detail
