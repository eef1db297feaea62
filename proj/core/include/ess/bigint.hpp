#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>

namespace ess {

// Arbitrary-precision non-negative counters. Trellis counts and codec
// indices must stay exact; no floating point is allowed on this path.
using BigInt = boost::multiprecision::cpp_int;

// Number of bits needed to represent v (0 for v == 0).
inline std::size_t bit_length(const BigInt& v) {
  if (v.is_zero()) return 0;
  return boost::multiprecision::msb(v) + 1;
}

inline BigInt pow2(std::size_t e) {
  BigInt r = 1;
  return r << e;
}

// log2 of a positive integer, accurate to double precision even when the
// value itself does not fit in a double.
double log2_big(const BigInt& v);

}  // namespace ess
