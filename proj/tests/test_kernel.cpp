#include "bisampler/kernel.hpp"
#include "bisampler/stats.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace bisampler;
using boost::multiprecision::cpp_int;

namespace {

Seed256 test_seed(std::uint8_t tag)
{
  Seed256 s{};
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<std::uint8_t>(i * 7 + tag);
  return s;
}

const KernelConfig& cfg1024()
{
  static const KernelConfig c = KernelConfig::make(falcon1024());
  return c;
}

// Independent Horner evaluation on arbitrary-precision integers.
std::uint64_t horner_big(std::uint64_t z, std::uint64_t ccs_int)
{
  cpp_int y = kExpCoeffs.c[0];
  for (std::size_t i = 1; i < 13; ++i)
    y = cpp_int(kExpCoeffs.c[i]) - ((cpp_int(z) * y) >> 63);
  return static_cast<std::uint64_t>((cpp_int(ccs_int) * y) >> 63);
}

// recorded from the first run
constexpr std::int64_t kFrozenValue = 2;
constexpr int kFrozenAttempts = 2;

} // namespace

TEST_CASE("pre_samp examples")
{
  const ParamSet p = falcon1024();
  auto pre = pre_samp({ 10.5, -1.25, p.sigma_min }, p);
  CHECK(pre.r_l == Fxp81::from_double(0.5));
  CHECK(pre.ccs == Fxp81::from_int(1));
  CHECK(pre.floor_mu_l == 10);
  CHECK(pre.floor_mu_r == -2);
  CHECK(pre.r_r == Fxp81::from_double(0.75));

  pre = pre_samp({ 0.0, 0.0, 1.5 }, p);
  CHECK(pre.ccs.to_double() == doctest::Approx(0.851889).epsilon(1e-6));
  CHECK(pre.ccs.to_double() == p.sigma_min / 1.5);
  CHECK(pre.inv_2sigma2.to_double() == 1.0 / 4.5);
}

TEST_CASE("pre_samp errors")
{
  const ParamSet p = falcon1024();
  CHECK_THROWS_AS(pre_samp({ 0.0, 0.0, p.sigma_min - 1e-9 }, p), std::range_error);
  CHECK_THROWS_AS(pre_samp({ 0.0, 0.0, p.sigma_max + 1e-9 }, p), std::range_error);
  CHECK_THROWS_AS(pre_samp({ NAN, 0.0, 1.5 }, p), std::range_error);
  CHECK_THROWS_AS(pre_samp({ 0.0, INFINITY, 1.5 }, p), std::range_error);
  CHECK_NOTHROW(pre_samp({ 0.0, 0.0, p.sigma_max }, p));
}

TEST_CASE("bef_loop examples")
{
  const auto& lut = cfg1024().lut;
  const Fxp81 inv = Fxp81::from_double(1.0 / 4.5);
  CHECK(bef_loop(3, 1, Fxp81::from_double(0.5), inv, lut).z == 4);
  CHECK(bef_loop(3, 0, Fxp81::from_double(0.5), inv, lut).z == -3);
  const auto st = bef_loop(0, 0, Fxp81(), inv, lut);
  CHECK(st.z == 0);
  CHECK(st.x.raw() == 0);
  CHECK(st.s == 0);
  CHECK(st.res.raw() == 0);
  CHECK(st.z_int == 0);
  CHECK(st.y == kExpCoeffs.c[0]);
  CHECK_THROWS_AS(bef_loop(19, 0, Fxp81(), inv, lut), std::out_of_range);
}

TEST_CASE("bef_loop invariants over the whole input range")
{
  const auto& lut = cfg1024().lut;
  const ParamSet p = falcon1024();
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> ur(0.0, 1.0), us(p.sigma_min, p.sigma_max);
  for (int i = 0; i < 200000; ++i) {
    const int z0 = static_cast<int>(g() % 19);
    const int b = static_cast<int>(g() & 1);
    const Fxp81 r = Fxp81::from_double(ur(g));
    const double sp = i % 100 == 0 ? p.sigma_max : us(g);
    const auto st = bef_loop(z0, b, r, Fxp81::from_double(1.0 / (2.0 * sp * sp)), lut);
    REQUIRE(st.res < fxp::ln2);
    REQUIRE(st.s >= 0);
    REQUIRE(st.s <= 63);
    // s = floor(x / ln2) exactly, before clamping
    const cpp_int x = cpp_int(static_cast<std::uint64_t>(st.x.raw() >> 64)) << 64 |
                      cpp_int(static_cast<std::uint64_t>(st.x.raw()));
    const cpp_int l2 = cpp_int(static_cast<std::uint64_t>(fxp::ln2.raw() >> 64)) << 64 |
                       cpp_int(static_cast<std::uint64_t>(fxp::ln2.raw()));
    const cpp_int s_exact = x / l2;
    REQUIRE(std::min<long>(static_cast<long>(s_exact), 63) == st.s);
    REQUIRE(st.z == (b == 1 ? z0 + 1 : -z0));
  }
}

TEST_CASE("for_loop at res = 0 returns the constant term")
{
  PathState st;
  CHECK(for_loop(st, Fxp81::from_int(1)) == kExpCoeffs.c[12]);
  CHECK(kExpCoeffs.c[12] == 0x8000000000000000ULL);
  CHECK(kExpCoeffs.c[11] == 0x7FFFFFFFFFFF4800ULL);
}

TEST_CASE("for_loop near ln 2 gives one half")
{
  PathState st;
  st.res = Fxp81::from_raw(fxp::ln2.raw() - 1);
  st.z_int = static_cast<std::uint64_t>(st.res.raw() >> 9);
  const double y = static_cast<double>(for_loop(st, Fxp81::from_int(1))) / 9223372036854775808.0;
  CHECK(std::abs(y - 0.5) / 0.5 < std::ldexp(1.0, -40));
}

TEST_CASE("ApproxExp accuracy on [0, ln 2]")
{
  using big = boost::multiprecision::cpp_bin_float_50;
  const big two63 = ldexp(big(1), 63);
  const big ln2 = log(big(2));
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const big r = ln2 * i / 10000;
    const auto z = static_cast<std::uint64_t>(floor(r * two63));
    const big rz = big(z) / two63;
    const big y = big(exp_horner(z)) / two63;
    worst = std::max(worst, static_cast<double>(abs(y - exp(-rz))));
  }
  CHECK(worst < std::ldexp(1.0, -40));
}

TEST_CASE("approx_exp equals an independent integer implementation")
{
  std::mt19937_64 g(2);
  const std::uint64_t z_max = static_cast<std::uint64_t>(fxp::ln2.raw() >> 9);
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t z = g() % (z_max + 1);
    const std::uint64_t c = i % 10 == 0 ? (std::uint64_t(1) << 63) : (g() >> 1);
    REQUIRE(approx_exp(z, c) == horner_big(z, c));
  }
}

TEST_CASE("cmp examples")
{
  {
    ScriptedBytes src({ 0x00 });
    const auto r = cmp(std::uint64_t(1) << 62, 0, src);
    CHECK(r.accept);
    CHECK(r.iterations == 1);
  }
  {
    // zc = 2y - 1 with y = 0x4000000000000001 -> 0x8000000000000001
    ScriptedBytes src({ 0x80, 0, 0, 0, 0, 0, 0, 0x01 });
    const auto r = cmp(0x4000000000000001ULL, 0, src);
    CHECK(!r.accept);
    CHECK(r.iterations == 8);
  }
  {
    ScriptedBytes src({ 0x80, 0, 0, 0, 0x00 });
    const auto r = cmp(0x4000000000800001ULL, 0, src);
    CHECK(r.accept);
    CHECK(r.iterations == 5);
  }
  {
    // y = 2^63 needs the 65-bit intermediate: zc = 2^64 - 1
    ScriptedBytes src({ 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFE });
    const auto r = cmp(std::uint64_t(1) << 63, 0, src);
    CHECK(r.accept);
    CHECK(r.iterations == 8);
  }
  {
    ScriptedBytes src({ 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00 });
    CHECK(!cmp(0, 0, src).accept);
  }
}

TEST_CASE("cmp acceptance frequency equals zc / 2^64")
{
  LaneRandom rnd(test_seed(1));
  LaneSource src(rnd, Lane::left);
  const std::uint64_t y = 0x5a3c1e0f12345678ULL;
  for (int s : { 0, 1, 3 }) {
    const double p = std::ldexp(static_cast<double>((uint128(y) * 2 - 1) >> s), -64);
    const int n = 1000000;
    int acc = 0;
    for (int i = 0; i < n; ++i)
      acc += cmp(y, s, src).accept ? 1 : 0;
    const double sd = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(acc - n * p) < 3 * sd);
  }
}

TEST_CASE("BerExp acceptance probability is ccs * exp(-x)")
{
  LaneRandom rnd(test_seed(2));
  LaneSource src(rnd, Lane::right);
  const std::pair<double, double> pts[] = { { 0.0, 1.0 }, { 0.3, 0.9 }, { 0.9, 0.8 }, { 1.7, 1.0 }, { 3.2, 0.75 } };
  for (auto [x, ccs] : pts) {
    const int s = static_cast<int>(std::floor(x / std::log(2.0)));
    const double r = x - s * std::log(2.0);
    const auto z = static_cast<std::uint64_t>(std::ldexp(r, 63));
    const auto c = ccs == 1.0 ? (std::uint64_t(1) << 63) : static_cast<std::uint64_t>(std::ldexp(ccs, 63));
    const std::uint64_t y = approx_exp(z, c);
    const double p = ccs * std::exp(-x);
    const int n = 1000000;
    int acc = 0;
    for (int i = 0; i < n; ++i)
      acc += cmp(y, s, src).accept ? 1 : 0;
    const double sd = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(acc - n * p) < 3 * sd + 1);
  }
}

TEST_CASE("fpr_add examples")
{
  const auto& lut = cfg1024().lut;
  CHECK(fpr_add(4, 10, lut) == 14.0);
  CHECK(fpr_add(-3, -2, lut) == -5.0);
  CHECK(fpr_add(0, 0, lut) == 0.0);
}

TEST_CASE("Gaussian LUTs")
{
  const auto& lut = cfg1024().lut;
  CHECK(lut.t[0].raw() == 0);
  for (std::size_t i = 0; i + 1 < lut.t.size(); ++i)
    CHECK(lut.t[i] < lut.t[i + 1]);
  const double s = kSigmaMax;
  for (std::size_t z0 = 0; z0 < lut.t.size(); ++z0) {
    CHECK(lut.t[z0] == mul(Fxp81::from_int(static_cast<std::uint32_t>(z0 * z0)),
                           Fxp81::from_double(1.0 / (2.0 * s * s))));
    CHECK(lut.t[z0].to_double() == doctest::Approx(double(z0 * z0) / (2.0 * s * s)).epsilon(1e-15));
  }
  for (int z = GaussLut::kZMin; z <= GaussLut::kZMax; ++z)
    CHECK(lut.z_value(z) == static_cast<double>(z));
}

TEST_CASE("candidate draw order")
{
  std::vector<std::uint8_t> bytes(9, 0xFF);
  bytes.push_back(0x03);
  ScriptedBytes src(bytes);
  const auto c = draw_candidate(src, default_rcdt());
  CHECK(c.z0 == 0);
  CHECK(c.b == 1);
  CHECK(src.consumed() == 10);
}

TEST_CASE("frozen sample values")
{
  LaneRandom a(test_seed(3)), b(test_seed(3));
  LaneSource sa(a, Lane::left), sb(b, Lane::left);
  const auto f = samplerz_fixed(0.3, 1.5, sa, cfg1024());
  const auto o = samplerz_oracle(0.3, 1.5, sb, cfg1024());
  CHECK(f.value == o.value);
  CHECK(f.attempts == o.attempts);
  CHECK(f.value == kFrozenValue);
  CHECK(f.attempts == kFrozenAttempts);
}

TEST_CASE("fixed pipeline equals the oracle on random tasks")
{
  const ParamSet p = falcon1024();
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> um(-64.0, 64.0), us(p.sigma_min, p.sigma_max);
  LaneRandom a(test_seed(4)), b(test_seed(4));
  LaneSource sa(a, Lane::left), sb(b, Lane::left);
  for (int i = 0; i < 20000; ++i) {
    const double mu = um(g), sp = us(g);
    const auto f = samplerz_fixed(mu, sp, sa, cfg1024());
    const auto o = samplerz_oracle(mu, sp, sb, cfg1024());
    REQUIRE(f.value == o.value);
    REQUIRE(f.attempts == o.attempts);
    for (std::size_t k = 0; k < f.log.size(); ++k) {
      REQUIRE(f.log[k].z0 == o.log[k].z0);
      REQUIRE(f.log[k].accept == o.log[k].accept);
    }
  }
  CHECK(a.bytes_consumed(Lane::left) == b.bytes_consumed(Lane::left));
}

TEST_CASE("sample moments and distribution at mu = 0, sigma' = 1.5")
{
  LaneRandom rnd(test_seed(5));
  LaneSource src(rnd, Lane::left);
  const int n = 1000000;
  Histogram h(-30, 30);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto v = samplerz_fixed(0.0, 1.5, src, cfg1024()).value;
    h.add(v);
    sum += static_cast<double>(v);
  }
  CHECK(std::abs(sum / n) < 5 * 1.5 / std::sqrt(double(n)));
  const auto rep = dist_report("mu0", h, target_pmf(0.0, 1.5, -30, 30));
  CHECK(rep.outside == 0);
  CHECK(rep.chi.p_value > 0.01);
}

TEST_CASE("attempt cap")
{
  ScriptedBytes src(std::vector<std::uint8_t>(11 * kMaxAttempts, 0xFF));
  CHECK_THROWS_AS(samplerz_fixed(0.3, 1.5, src, cfg1024()), std::runtime_error);
  ScriptedBytes src2(std::vector<std::uint8_t>(11 * kMaxAttempts, 0xFF));
  CHECK_THROWS_AS(samplerz_oracle(0.3, 1.5, src2, cfg1024()), std::runtime_error);
}

TEST_CASE("custom sigma_max regenerates the tables")
{
  const auto c = KernelConfig::make(make_param_set("custom", 1.3, 1.9));
  CHECK(c.rcdt != default_rcdt());
  CHECK_NOTHROW(c.rcdt.validate());
  CHECK(c.lut.inv_2sigmax2 == Fxp81::from_double(1.0 / (2.0 * 1.9 * 1.9)));
}
