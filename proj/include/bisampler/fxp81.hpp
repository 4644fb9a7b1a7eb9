#pragma once
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bisampler {

__extension__ typedef unsigned __int128 uint128;

// 81-bit unsigned fixed-point value: 9 integer bits, 72 fractional bits.
// value = raw / 2^72. Rounding is always truncation toward zero.
class Fxp81
{
public:
  static constexpr int kFracBits = 72;
  static constexpr int kIntBits = 9;
  static constexpr int kWidth = kFracBits + kIntBits;
  static constexpr uint128 kRawMask = (uint128(1) << kWidth) - 1;
  static constexpr uint128 kOne = uint128(1) << kFracBits;

  constexpr Fxp81() = default;

  // Throws std::range_error when raw does not fit in 81 bits.
  static Fxp81 from_raw(uint128 raw);

  // floor(v * 2^72). Throws std::range_error for v < 0, v >= 512, NaN or inf.
  static Fxp81 from_double(double v);

  static Fxp81 from_int(std::uint32_t v);

  constexpr uint128 raw() const noexcept { return raw_; }

  // Nearest double to raw / 2^72.
  double to_double() const noexcept;

  // floor(value)
  constexpr std::uint32_t integer_part() const noexcept
  {
    return static_cast<std::uint32_t>(raw_ >> kFracBits);
  }

  // 21 hex digits, most significant first.
  std::string to_hex() const;
  static Fxp81 from_hex(std::string_view hex);

  friend constexpr auto operator<=>(const Fxp81&, const Fxp81&) = default;

private:
  constexpr explicit Fxp81(uint128 raw) noexcept
    : raw_(raw)
  {
  }

  uint128 raw_ = 0;

  friend Fxp81 mul(Fxp81, Fxp81);
  friend Fxp81 sub(Fxp81, Fxp81);
  friend Fxp81 add(Fxp81, Fxp81);
  friend Fxp81 shr(Fxp81, unsigned);
};

// Full 162-bit product of the raw values, bits [153:72]. The caller
// guarantees the true product is below 2^9; a violation throws
// std::overflow_error.
Fxp81 mul(Fxp81 a, Fxp81 b);

// True when a*b would not fit the 9 integer bits.
bool mul_overflows(Fxp81 a, Fxp81 b) noexcept;

// Exact. Throws std::underflow_error when a < b.
Fxp81 sub(Fxp81 a, Fxp81 b);

// Exact. Throws std::overflow_error when the sum reaches 512.
Fxp81 add(Fxp81 a, Fxp81 b);

// raw >> k for 0 <= k <= 80.
Fxp81 shr(Fxp81 a, unsigned k);

namespace fxp {

// floor(ln 2 * 2^72) and floor(2^72 / ln 2)
inline const Fxp81 ln2 = Fxp81::from_raw((uint128(0xb1) << 64) | 0x7217f7d1cf79abc9ULL);
inline const Fxp81 inv_ln2 = Fxp81::from_raw((uint128(0x171) << 64) | 0x547652b82fe1777dULL);

} // namespace fxp

} // namespace bisampler
