#include "bisampler/fxp81.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace bisampler;
using boost::multiprecision::cpp_int;

namespace {

cpp_int to_big(uint128 v)
{
  return (cpp_int(static_cast<std::uint64_t>(v >> 64)) << 64) | cpp_int(static_cast<std::uint64_t>(v));
}

uint128 from_big(const cpp_int& v)
{
  return (uint128(static_cast<std::uint64_t>(v >> 64)) << 64) |
         static_cast<std::uint64_t>(v & cpp_int(0xFFFFFFFFFFFFFFFFULL));
}

uint128 random_raw(std::mt19937_64& g, int bits)
{
  const uint128 v = (uint128(g()) << 64) | g();
  return bits >= 128 ? v : v & ((uint128(1) << bits) - 1);
}

} // namespace

TEST_CASE("from_double scale examples")
{
  CHECK(Fxp81::from_double(1.0).raw() == Fxp81::kOne);
  CHECK(Fxp81::from_double(0.5).raw() == Fxp81::kOne / 2);
  CHECK(Fxp81::from_double(0.0).raw() == 0);
  CHECK(Fxp81::from_double(361.0) == Fxp81::from_int(361));
}

TEST_CASE("from_double rejects out-of-range input")
{
  CHECK_THROWS_AS(Fxp81::from_double(-1e-300), std::range_error);
  CHECK_THROWS_AS(Fxp81::from_double(512.0), std::range_error);
  CHECK_THROWS_AS(Fxp81::from_double(std::nan("")), std::range_error);
  CHECK_THROWS_AS(Fxp81::from_double(INFINITY), std::range_error);
  CHECK_NOTHROW(Fxp81::from_double(std::nextafter(512.0, 0.0)));
}

TEST_CASE("from_double(ln 2) equals the big-number floor")
{
  using big = boost::multiprecision::cpp_bin_float_100;
  const double ln2d = std::log(2.0);
  const big exact = floor(big(ln2d) * ldexp(big(1), 72));
  CHECK(to_big(Fxp81::from_double(ln2d).raw()) == cpp_int(exact));
}

TEST_CASE("ln2 and 1/ln2 constants are the 72-bit floors")
{
  using big = boost::multiprecision::cpp_bin_float_100;
  const big l = log(big(2));
  CHECK(to_big(fxp::ln2.raw()) == cpp_int(floor(l * ldexp(big(1), 72))));
  CHECK(to_big(fxp::inv_ln2.raw()) == cpp_int(floor(ldexp(big(1), 72) / l)));
}

TEST_CASE("to_double examples")
{
  CHECK(Fxp81::from_raw(Fxp81::kOne).to_double() == 1.0);
  CHECK(Fxp81().to_double() == 0.0);
  const double l = fxp::ln2.to_double();
  CHECK(std::abs(l - 0.6931471805599453) <= std::nextafter(0.6931471805599453, 1.0) - 0.6931471805599453);
}

TEST_CASE("round trip is lossless for exponents >= -20")
{
  std::mt19937_64 g(1);
  std::uniform_int_distribution<int> ex(-20, 8);
  std::uniform_real_distribution<double> m(1.0, 2.0);
  for (int i = 0; i < 200000; ++i) {
    const double v = std::ldexp(m(g), ex(g));
    if (v >= 512.0)
      continue;
    REQUIRE(Fxp81::from_double(v).to_double() == v);
  }
}

TEST_CASE("mul examples")
{
  const auto one = Fxp81::from_int(1);
  const auto half = Fxp81::from_double(0.5);
  CHECK(mul(one, one) == one);
  CHECK(mul(half, half) == Fxp81::from_double(0.25));
  CHECK(mul(Fxp81::from_int(19), Fxp81::from_int(19)) == Fxp81::from_int(361));
}

TEST_CASE("mul equals the 162-bit oracle on 10^6 random pairs")
{
  std::mt19937_64 g(2);
  std::uniform_int_distribution<int> bits(1, 81);
  int checked = 0;
  for (int i = 0; i < 1000000; ++i) {
    const int ba = bits(g);
    const int bb = std::min(81, std::max(1, 153 - ba - static_cast<int>(g() % 8)));
    const auto a = Fxp81::from_raw(random_raw(g, ba));
    const auto b = Fxp81::from_raw(random_raw(g, bb));
    const cpp_int full = (to_big(a.raw()) * to_big(b.raw())) >> 72;
    if (full >= (cpp_int(1) << 81)) {
      REQUIRE(mul_overflows(a, b));
      REQUIRE_THROWS_AS(mul(a, b), std::overflow_error);
      continue;
    }
    ++checked;
    REQUIRE(!mul_overflows(a, b));
    REQUIRE(mul(a, b).raw() == from_big(full));
  }
  CHECK(checked > 500000);
}

TEST_CASE("mul is monotone")
{
  std::mt19937_64 g(3);
  for (int i = 0; i < 100000; ++i) {
    const auto a = Fxp81::from_raw(random_raw(g, 76));
    const auto b = Fxp81::from_raw(random_raw(g, 76));
    const auto a2 = add(a, Fxp81::from_raw(random_raw(g, 60)));
    const auto b2 = add(b, Fxp81::from_raw(random_raw(g, 60)));
    REQUIRE(mul(a, b) <= mul(a2, b2));
  }
}

TEST_CASE("mul at the top of the range")
{
  const auto max = Fxp81::from_raw(Fxp81::kRawMask);
  CHECK_THROWS_AS(mul(max, Fxp81::from_int(2)), std::overflow_error);
  CHECK(mul(max, Fxp81::from_int(1)) == max);
  CHECK(mul(Fxp81::from_raw(1), Fxp81::from_raw(1)).raw() == 0);
}

TEST_CASE("sub examples")
{
  CHECK(sub(Fxp81::from_int(1), Fxp81::from_double(0.25)) == Fxp81::from_double(0.75));
  const auto a = Fxp81::from_double(3.75);
  CHECK(sub(a, a).raw() == 0);
  CHECK(sub(Fxp81::from_int(361), Fxp81::from_double(360.5)) == Fxp81::from_double(0.5));
  CHECK_THROWS_AS(sub(Fxp81::from_double(0.25), Fxp81::from_double(0.5)), std::underflow_error);
}

TEST_CASE("sub is exact")
{
  std::mt19937_64 g(4);
  for (int i = 0; i < 100000; ++i) {
    auto a = Fxp81::from_raw(random_raw(g, 81));
    auto b = Fxp81::from_raw(random_raw(g, 81));
    if (a < b)
      std::swap(a, b);
    REQUIRE(to_big(sub(a, b).raw()) == to_big(a.raw()) - to_big(b.raw()));
  }
}

TEST_CASE("add overflow and shr")
{
  CHECK_THROWS_AS(add(Fxp81::from_int(511), Fxp81::from_int(1)), std::overflow_error);
  CHECK(shr(Fxp81::from_int(1), 1) == Fxp81::from_double(0.5));
  CHECK(shr(Fxp81(), 17).raw() == 0);
  CHECK(shr(Fxp81::from_int(361), 1) == Fxp81::from_double(180.5));
  CHECK_THROWS_AS(shr(Fxp81::from_int(1), 81), std::invalid_argument);
}

TEST_CASE("hex serialization")
{
  const auto v = fxp::ln2;
  const std::string h = v.to_hex();
  CHECK(h.size() == 21);
  CHECK(h == "000b17217f7d1cf79abc9");
  CHECK(Fxp81::from_hex(h) == v);
  CHECK_THROWS(Fxp81::from_hex("1fffffffffffffffffffff"));
  CHECK_THROWS_AS(Fxp81::from_hex("2000000000000000000000"), std::invalid_argument);
  CHECK_THROWS_AS(Fxp81::from_hex("400000000000000000000"), std::range_error);
  CHECK_THROWS_AS(Fxp81::from_raw(uint128(1) << 81), std::range_error);
}
