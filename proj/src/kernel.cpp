#include "bisampler/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bisampler {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInvLn2 = 1.4426950408889634074;
constexpr double kTwo63 = 9223372036854775808.0;

const Fxp81 kMaxSquare = Fxp81::from_int(361);

std::uint64_t trunc_u63(double v)
{
  return static_cast<std::uint64_t>(v * kTwo63);
}

} // namespace

GaussLut GaussLut::build(double sigma_max)
{
  GaussLut lut;
  lut.inv_2sigmax2 = Fxp81::from_double(1.0 / (2.0 * sigma_max * sigma_max));
  for (std::size_t z0 = 0; z0 < lut.t.size(); ++z0)
    lut.t[z0] = mul(Fxp81::from_int(static_cast<std::uint32_t>(z0 * z0)), lut.inv_2sigmax2);
  for (int z = kZMin; z <= kZMax; ++z)
    lut.zf[static_cast<std::size_t>(z - kZMin)] = static_cast<double>(z);
  return lut;
}

KernelConfig KernelConfig::make(const ParamSet& p)
{
  KernelConfig cfg;
  cfg.params = p;
  cfg.rcdt = p.sigma_max == kSigmaMax ? default_rcdt() : make_rcdt(p.sigma_max);
  cfg.lut = GaussLut::build(p.sigma_max);
  return cfg;
}

PreComputed pre_samp(const SampleTask& task, const ParamSet& params)
{
  if (!(task.sigma_prime >= params.sigma_min && task.sigma_prime <= params.sigma_max))
    throw std::range_error("pre_samp: sigma_prime outside [sigma_min, sigma_max]");
  if (!std::isfinite(task.mu_l) || !std::isfinite(task.mu_r))
    throw std::range_error("pre_samp: non-finite center");

  PreComputed pre;
  const double fl = std::floor(task.mu_l);
  const double fr = std::floor(task.mu_r);
  pre.floor_mu_l = static_cast<std::int64_t>(fl);
  pre.floor_mu_r = static_cast<std::int64_t>(fr);
  pre.r_l = Fxp81::from_double(task.mu_l - fl);
  pre.r_r = Fxp81::from_double(task.mu_r - fr);
  pre.ccs = Fxp81::from_double(params.sigma_min / task.sigma_prime);
  pre.inv_2sigma2 = Fxp81::from_double(1.0 / (2.0 * task.sigma_prime * task.sigma_prime));
  return pre;
}

Candidate draw_candidate(ByteSource& src, const Rcdt& t)
{
  std::array<std::uint8_t, 9> u{};
  for (auto& v : u)
    v = src.next_byte();
  Candidate c;
  c.z0 = z0_scan(le_bytes_to_u72(u), t);
  c.b = src.next_byte() & 1;
  return c;
}

PathState bef_loop(int z0, int b, Fxp81 r, Fxp81 inv_2sigma2, const GaussLut& lut)
{
  if (z0 < 0 || z0 > static_cast<int>(Rcdt::kSize))
    throw std::out_of_range("bef_loop: z0 outside [0, 18]");

  PathState st;
  st.z0 = z0;
  st.b = b & 1;
  st.z = st.b + (2 * st.b - 1) * z0;

  // |z - r| without leaving the unsigned domain
  const Fxp81 d = st.b == 0 ? add(Fxp81::from_int(static_cast<std::uint32_t>(z0)), r)
                            : sub(Fxp81::from_int(static_cast<std::uint32_t>(z0 + 1)), r);
  const Fxp81 sq = mul(d, d);
  if (sq > kMaxSquare)
    throw std::logic_error("bef_loop: (z - r)^2 exceeds 361");
  st.x = sub(mul(sq, inv_2sigma2), lut.t[static_cast<std::size_t>(z0)]);

  // exact floor(x / ln2), then the residue
  const uint128 ln2 = fxp::ln2.raw();
  uint128 s = mul(st.x, fxp::inv_ln2).integer_part();
  while (s > 0 && s * ln2 > st.x.raw())
    --s;
  while ((s + 1) * ln2 <= st.x.raw())
    ++s;
  st.res = Fxp81::from_raw(st.x.raw() - s * ln2);
  st.s = static_cast<int>(std::min<uint128>(s, 63));
  st.z_int = static_cast<std::uint64_t>(st.res.raw() >> (Fxp81::kFracBits - 63));
  st.y = kExpCoeffs.c[0];
  return st;
}

std::uint64_t for_loop(const PathState& st, Fxp81 ccs, const ExpCoeffs& k)
{
  const auto ccs_int = static_cast<std::uint64_t>(ccs.raw() >> (Fxp81::kFracBits - 63));
  return approx_exp(st.z_int, ccs_int, k);
}

CmpResult cmp(std::uint64_t y, int s, ByteSource& src)
{
  const uint128 zc = y == 0 ? 0 : ((uint128(y) << 1) - 1) >> s;
  CmpResult out;
  int i = 64;
  int w = 0;
  do {
    i -= 8;
    w = static_cast<int>(src.next_byte()) - static_cast<int>((zc >> i) & 0xFF);
    ++out.iterations;
  } while (w == 0 && i > 0);
  out.accept = w < 0;
  return out;
}

double fpr_add(int z, std::int64_t floor_mu, const GaussLut& lut)
{
  return lut.z_value(z) + static_cast<double>(floor_mu);
}

SamplerZResult samplerz_fixed(double mu, double sigma_prime, ByteSource& src, const KernelConfig& cfg)
{
  const PreComputed pre = pre_samp({ mu, mu, sigma_prime }, cfg.params);
  SamplerZResult out;
  while (out.attempts < kMaxAttempts) {
    ++out.attempts;
    const Candidate c = draw_candidate(src, cfg.rcdt);
    PathState st = bef_loop(c.z0, c.b, pre.r_l, pre.inv_2sigma2, cfg.lut);
    st.y = for_loop(st, pre.ccs);
    st.accepted = cmp(st.y, st.s, src).accept;
    out.log.push_back({ st.z0, st.b, st.s, st.accepted });
    if (st.accepted) {
      out.value = st.z + pre.floor_mu_l;
      return out;
    }
  }
  throw std::runtime_error("samplerz_fixed: attempt cap reached");
}

SamplerZResult samplerz_oracle(double mu, double sigma_prime, ByteSource& src, const KernelConfig& cfg)
{
  if (!(sigma_prime >= cfg.params.sigma_min && sigma_prime <= cfg.params.sigma_max))
    throw std::range_error("samplerz_oracle: sigma_prime outside [sigma_min, sigma_max]");
  const double fl = std::floor(mu);
  const double r = mu - fl;
  const double dss = 1.0 / (2.0 * sigma_prime * sigma_prime);
  const double inv_smax = 1.0 / (2.0 * cfg.params.sigma_max * cfg.params.sigma_max);
  const std::uint64_t ccs_int = trunc_u63(cfg.params.sigma_min / sigma_prime);

  SamplerZResult out;
  while (out.attempts < kMaxAttempts) {
    ++out.attempts;
    const Candidate c = draw_candidate(src, cfg.rcdt);
    const int z = c.b + (2 * c.b - 1) * c.z0;
    const double d = static_cast<double>(z) - r;
    const double x = std::max(0.0, d * d * dss - static_cast<double>(c.z0 * c.z0) * inv_smax);
    int s = static_cast<int>(x * kInvLn2);
    const double rr = std::max(0.0, x - static_cast<double>(s) * kLn2);
    s = std::min(s, 63);
    const std::uint64_t y = approx_exp(trunc_u63(rr), ccs_int);
    const bool accept = cmp(y, s, src).accept;
    out.log.push_back({ c.z0, c.b, s, accept });
    if (accept) {
      out.value = z + static_cast<std::int64_t>(fl);
      return out;
    }
  }
  throw std::runtime_error("samplerz_oracle: attempt cap reached");
}

} // namespace bisampler
