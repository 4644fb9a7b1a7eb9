#pragma once
#include "bisampler/fxp81.hpp"

#include <array>
#include <cstdint>

namespace bisampler {

// Degree-12 integer Horner coefficients of 2^63 * exp(-x) on [0, ln 2].
struct ExpCoeffs
{
  std::array<std::uint64_t, 13> c{};
};

inline constexpr ExpCoeffs kExpCoeffs{ {
  0x00000004741183A3ULL,
  0x00000036548CFC06ULL,
  0x0000024FDCBF140AULL,
  0x0000171D939DE045ULL,
  0x0000D00CF58F6F84ULL,
  0x000680681CF796E3ULL,
  0x002D82D8305B0FEAULL,
  0x011111110E066FD0ULL,
  0x0555555555070F00ULL,
  0x155555555581FF00ULL,
  0x400000000002B400ULL,
  0x7FFFFFFFFFFF4800ULL,
  0x8000000000000000ULL,
} };

// (a * b) >> 63 over the full 128-bit product.
constexpr std::uint64_t mul_shr63(std::uint64_t a, std::uint64_t b) noexcept
{
  return static_cast<std::uint64_t>((uint128(a) * b) >> 63);
}

// The twelve Horner steps y <- C[i] - ((z * y) >> 63), with
// z = floor(2^63 * r) for r in [0, ln 2).
constexpr std::uint64_t exp_horner(std::uint64_t z, const ExpCoeffs& k = kExpCoeffs) noexcept
{
  std::uint64_t y = k.c[0];
  for (std::size_t i = 1; i < k.c.size(); ++i)
    y = k.c[i] - mul_shr63(z, y);
  return y;
}

// ~ 2^63 * ccs * exp(-r), with ccs_int = floor(2^63 * ccs), ccs <= 1.
constexpr std::uint64_t approx_exp(std::uint64_t z, std::uint64_t ccs_int, const ExpCoeffs& k = kExpCoeffs) noexcept
{
  return mul_shr63(ccs_int, exp_horner(z, k));
}

} // namespace bisampler
