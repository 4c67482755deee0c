#pragma once

#include <cstdint>
#include <span>

// Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x^2 + 1 (0x11d), generator 2.
namespace sedna::gf256 {

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0
std::uint8_t pow(std::uint8_t a, unsigned e);

// dst[i] ^= c * src[i]
void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, std::uint8_t c);
// v[i] = c * v[i]
void scale(std::span<std::uint8_t> v, std::uint8_t c);

// Byte-level multiply-accumulate operations performed by mul_add/scale on the
// calling thread since the last reset. Used for operation-count reporting.
std::uint64_t op_count();
void reset_op_count();

}  // namespace sedna::gf256
