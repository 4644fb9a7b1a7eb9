#include "bisampler/simd.hpp"

#if defined(__x86_64__)
#include <immintrin.h>

#include <array>

namespace bisampler::simd::avx2 {

namespace {

constexpr std::uint32_t kLimbMask = 0xFFFFFF;

// 72-bit values as three 24-bit limbs in 32-bit lanes; the sign bit of each
// limb difference is the borrow into the next limb.
__attribute__((target("avx2"))) __m256i
z0_lanes(const std::array<std::uint32_t, 8>& v0,
         const std::array<std::uint32_t, 8>& v1,
         const std::array<std::uint32_t, 8>& v2,
         const Rcdt& t)
{
  const __m256i a0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v0.data()));
  const __m256i a1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v1.data()));
  const __m256i a2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v2.data()));
  __m256i z = _mm256_setzero_si256();
  for (uint128 e : t.entries) {
    const auto e0 = static_cast<int>(static_cast<std::uint32_t>(e) & kLimbMask);
    const auto e1 = static_cast<int>(static_cast<std::uint32_t>(e >> 24) & kLimbMask);
    const auto e2 = static_cast<int>(static_cast<std::uint32_t>(e >> 48) & kLimbMask);
    __m256i w = _mm256_sub_epi32(a0, _mm256_set1_epi32(e0));
    __m256i cc = _mm256_srli_epi32(w, 31);
    w = _mm256_sub_epi32(_mm256_sub_epi32(a1, _mm256_set1_epi32(e1)), cc);
    cc = _mm256_srli_epi32(w, 31);
    w = _mm256_sub_epi32(_mm256_sub_epi32(a2, _mm256_set1_epi32(e2)), cc);
    cc = _mm256_srli_epi32(w, 31);
    z = _mm256_add_epi32(z, cc);
  }
  return z;
}

// (a * b) >> 63 per 64-bit lane from four 32x32 partial products; a < 2^63
// keeps the high word below 2^63.
__attribute__((target("avx2"))) inline __m256i
mul_shr63(__m256i a, __m256i b)
{
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFF);
  const __m256i a_hi = _mm256_srli_epi64(a, 32);
  const __m256i b_hi = _mm256_srli_epi64(b, 32);
  const __m256i p00 = _mm256_mul_epu32(a, b);
  const __m256i p01 = _mm256_mul_epu32(a, b_hi);
  const __m256i p10 = _mm256_mul_epu32(a_hi, b);
  const __m256i p11 = _mm256_mul_epu32(a_hi, b_hi);
  const __m256i mid = _mm256_add_epi64(_mm256_srli_epi64(p00, 32),
                                       _mm256_add_epi64(_mm256_and_si256(p01, mask32),
                                                        _mm256_and_si256(p10, mask32)));
  __m256i hi = _mm256_add_epi64(p11, _mm256_srli_epi64(p01, 32));
  hi = _mm256_add_epi64(hi, _mm256_srli_epi64(p10, 32));
  hi = _mm256_add_epi64(hi, _mm256_srli_epi64(mid, 32));
  const __m256i bit63 = _mm256_and_si256(_mm256_srli_epi64(mid, 31), _mm256_set1_epi64x(1));
  return _mm256_or_si256(_mm256_slli_epi64(hi, 1), bit63);
}

} // namespace

__attribute__((target("avx2"))) void
z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t) noexcept
{
  std::size_t i = 0;
  std::array<std::uint32_t, 8> v0{}, v1{}, v2{}, z{};
  for (; i + 8 <= u.size(); i += 8) {
    for (std::size_t j = 0; j < 8; ++j) {
      const uint128 x = u[i + j];
      v0[j] = static_cast<std::uint32_t>(x) & kLimbMask;
      v1[j] = static_cast<std::uint32_t>(x >> 24) & kLimbMask;
      v2[j] = static_cast<std::uint32_t>(x >> 48) & kLimbMask;
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(z.data()), z0_lanes(v0, v1, v2, t));
    for (std::size_t j = 0; j < 8; ++j)
      out[i + j] = static_cast<std::uint8_t>(z[j]);
  }
  if (i < u.size())
    scalar::z0_batch(u.subspan(i), out.subspan(i), t);
}

__attribute__((target("avx2"))) void
approx_exp_batch(std::span<const std::uint64_t> z,
                 std::span<const std::uint64_t> ccs_int,
                 std::span<std::uint64_t> out) noexcept
{
  const auto& c = kExpCoeffs.c;
  std::size_t i = 0;
  for (; i + 4 <= z.size(); i += 4) {
    const __m256i zv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(z.data() + i));
    __m256i y = _mm256_set1_epi64x(static_cast<long long>(c[0]));
    for (std::size_t k = 1; k < c.size(); ++k)
      y = _mm256_sub_epi64(_mm256_set1_epi64x(static_cast<long long>(c[k])), mul_shr63(zv, y));
    const __m256i cv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ccs_int.data() + i));
    y = mul_shr63(cv, y);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), y);
  }
  if (i < z.size())
    scalar::approx_exp_batch(z.subspan(i), ccs_int.subspan(i), out.subspan(i));
}

} // namespace bisampler::simd::avx2
#endif
