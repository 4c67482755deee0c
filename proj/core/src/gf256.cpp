#include "sedna/gf256.hpp"

#include <array>
#include <cassert>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define SEDNA_GF_AVX2 1
#endif

namespace sedna::gf256 {
namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<int, 256> log{};
  // mul[a][b]; 64 KiB, built once.
  std::array<std::array<std::uint8_t, 256>, 256> mul{};

  Tables() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= 0x11d;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = -1;
    for (int a = 0; a < 256; ++a) {
      for (int b = 0; b < 256; ++b) {
        mul[a][b] = (a == 0 || b == 0) ? 0 : exp[log[a] + log[b]];
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

thread_local std::uint64_t g_ops = 0;

#ifdef SEDNA_GF_AVX2
// dst ^= c * src with split-nibble lookups: c*x = c*(x & 15) ^ c*(x & 0xf0).
__attribute__((target("avx2"))) std::size_t mul_add_avx2(std::uint8_t* dst, const std::uint8_t* src, std::size_t n,
                                                         const std::array<std::uint8_t, 256>& row) {
  alignas(16) std::uint8_t lo[16], hi[16];
  for (int i = 0; i < 16; ++i) {
    lo[i] = row[i];
    hi[i] = row[i << 4];
  }
  const __m256i tlo = _mm256_broadcastsi128_si256(_mm_load_si128(reinterpret_cast<const __m128i*>(lo)));
  const __m256i thi = _mm256_broadcastsi128_si256(_mm_load_si128(reinterpret_cast<const __m128i*>(hi)));
  const __m256i mask = _mm256_set1_epi8(0x0f);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i l = _mm256_shuffle_epi8(tlo, _mm256_and_si256(x, mask));
    const __m256i h = _mm256_shuffle_epi8(thi, _mm256_and_si256(_mm256_srli_epi16(x, 4), mask));
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(d, _mm256_xor_si256(l, h)));
  }
  return i;
}

bool have_avx2() {
  static const bool yes = __builtin_cpu_supports("avx2");
  return yes;
}
#endif

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) { return tables().mul[a][b]; }

std::uint8_t inv(std::uint8_t a) {
  assert(a != 0);
  const auto& t = tables();
  return t.exp[255 - t.log[a]];
}

std::uint8_t pow(std::uint8_t a, unsigned e) {
  std::uint8_t r = 1;
  for (unsigned i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, std::uint8_t c) {
  assert(dst.size() == src.size());
  if (c == 0) return;
  g_ops += dst.size();
  if (c == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
    return;
  }
  const auto& row = tables().mul[c];
  std::size_t i = 0;
#ifdef SEDNA_GF_AVX2
  if (dst.size() >= 32 && have_avx2()) i = mul_add_avx2(dst.data(), src.data(), dst.size(), row);
#endif
  for (; i < dst.size(); ++i) dst[i] ^= row[src[i]];
}

void scale(std::span<std::uint8_t> v, std::uint8_t c) {
  if (c == 1) return;
  g_ops += v.size();
  const auto& row = tables().mul[c];
  for (auto& x : v) x = row[x];
}

std::uint64_t op_count() { return g_ops; }
void reset_op_count() { g_ops = 0; }

}  // namespace sedna::gf256
