#include "bisampler/fxp81.hpp"

#include <cmath>
#include <stdexcept>

namespace bisampler {

namespace {

constexpr std::uint64_t lo64(uint128 v) noexcept
{
  return static_cast<std::uint64_t>(v);
}

constexpr std::uint64_t hi64(uint128 v) noexcept
{
  return static_cast<std::uint64_t>(v >> 64);
}

// (a*b) >> 72 without the 81-bit mask; at most 90 significant bits.
uint128 product_shifted(uint128 a, uint128 b) noexcept
{
  const std::uint64_t a0 = lo64(a), a1 = hi64(a);
  const std::uint64_t b0 = lo64(b), b1 = hi64(b);

  const uint128 p00 = uint128(a0) * b0;
  const uint128 mid = uint128(a0) * b1 + uint128(a1) * b0;
  const uint128 p11 = uint128(a1) * b1;

  const uint128 t = uint128(hi64(p00)) + lo64(mid);
  const std::uint64_t w1 = lo64(t);
  const uint128 w2 = p11 + hi64(mid) + hi64(t);

  return (w2 << 56) | (w1 >> 8);
}

} // namespace

Fxp81 Fxp81::from_raw(uint128 raw)
{
  if (raw > kRawMask)
    throw std::range_error("Fxp81: raw value exceeds 81 bits");
  return Fxp81(raw);
}

Fxp81 Fxp81::from_double(double v)
{
  if (!std::isfinite(v) || v < 0.0 || v >= 512.0)
    throw std::range_error("Fxp81: input outside [0, 512)");
  if (v == 0.0)
    return Fxp81();

  int exp = 0;
  const double frac = std::frexp(v, &exp); // v = frac * 2^exp, frac in [0.5, 1)
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  // v * 2^72 = mantissa * 2^(exp - 53 + 72)
  const int shift = exp - 53 + kFracBits;
  if (shift >= 0)
    return Fxp81(uint128(mantissa) << shift);
  if (shift <= -64)
    return Fxp81();
  return Fxp81(uint128(mantissa >> -shift));
}

Fxp81 Fxp81::from_int(std::uint32_t v)
{
  return from_raw(uint128(v) << kFracBits);
}

double Fxp81::to_double() const noexcept
{
  // int128 -> double conversion rounds to nearest; the scale is exact.
  return std::ldexp(static_cast<double>(raw_), -kFracBits);
}

std::string Fxp81::to_hex() const
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(21, '0');
  uint128 v = raw_;
  for (int i = 20; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(v & 0xF)];
    v >>= 4;
  }
  return out;
}

Fxp81 Fxp81::from_hex(std::string_view hex)
{
  if (hex.size() != 21)
    throw std::invalid_argument("Fxp81: expected 21 hex digits");
  uint128 v = 0;
  for (char c : hex) {
    unsigned d;
    if (c >= '0' && c <= '9')
      d = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f')
      d = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      d = static_cast<unsigned>(c - 'A' + 10);
    else
      throw std::invalid_argument("Fxp81: invalid hex digit");
    v = (v << 4) | d;
  }
  return from_raw(v);
}

bool mul_overflows(Fxp81 a, Fxp81 b) noexcept
{
  return (product_shifted(a.raw(), b.raw()) >> Fxp81::kWidth) != 0;
}

Fxp81 mul(Fxp81 a, Fxp81 b)
{
  const uint128 p = product_shifted(a.raw_, b.raw_);
  if ((p >> Fxp81::kWidth) != 0)
    throw std::overflow_error("Fxp81: product exceeds 9 integer bits");
  return Fxp81(p);
}

Fxp81 sub(Fxp81 a, Fxp81 b)
{
  if (a.raw_ < b.raw_)
    throw std::underflow_error("Fxp81: negative difference");
  return Fxp81(a.raw_ - b.raw_);
}

Fxp81 add(Fxp81 a, Fxp81 b)
{
  const uint128 s = a.raw_ + b.raw_;
  if (s > Fxp81::kRawMask)
    throw std::overflow_error("Fxp81: sum exceeds 9 integer bits");
  return Fxp81(s);
}

Fxp81 shr(Fxp81 a, unsigned k)
{
  if (k > 80)
    throw std::invalid_argument("Fxp81: shift out of range");
  return Fxp81(a.raw_ >> k);
}

} // namespace bisampler
