#pragma once
#include "bisampler/approx_exp.hpp"
#include "bisampler/fxp81.hpp"
#include "bisampler/params.hpp"
#include "bisampler/random.hpp"
#include "bisampler/rcdt.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace bisampler {

struct SampleTask
{
  double mu_l = 0.0;
  double mu_r = 0.0;
  double sigma_prime = 0.0;
};

struct PreComputed
{
  Fxp81 r_l;
  Fxp81 r_r;
  Fxp81 ccs;
  Fxp81 inv_2sigma2;
  std::int64_t floor_mu_l = 0;
  std::int64_t floor_mu_r = 0;
};

struct PathState
{
  int z0 = 0;
  int b = 0;
  int z = 0;
  Fxp81 x;
  int s = 0;
  Fxp81 res;
  std::uint64_t z_int = 0; // floor(2^63 * res)
  std::uint64_t y = 0;
  bool accepted = false;
};

// T[z0] = z0^2 / (2 sigma_max^2) and Zf[z] = z for z in [-18, 19].
struct GaussLut
{
  static constexpr int kZMin = -18;
  static constexpr int kZMax = 19;

  std::array<Fxp81, Rcdt::kSize + 1> t{};
  std::array<double, kZMax - kZMin + 1> zf{};
  Fxp81 inv_2sigmax2;

  static GaussLut build(double sigma_max);
  double z_value(int z) const { return zf.at(static_cast<std::size_t>(z - kZMin)); }
};

// Parameter set with the tables derived from it.
struct KernelConfig
{
  ParamSet params;
  Rcdt rcdt;
  GaussLut lut;

  static KernelConfig make(const ParamSet& p);
};

struct CmpResult
{
  bool accept = false;
  int iterations = 0; // bytes drawn, 1..8
};

// Throws std::range_error if sigma_prime lies outside [sigma_min, sigma_max]
// or a center is not finite.
PreComputed pre_samp(const SampleTask& task, const ParamSet& params);

// Candidate draw for one path: nine bytes for u, then one byte whose low bit
// is b.
struct Candidate
{
  int z0 = 0;
  int b = 0;
};
Candidate draw_candidate(ByteSource& src, const Rcdt& t);

PathState bef_loop(int z0, int b, Fxp81 r, Fxp81 inv_2sigma2, const GaussLut& lut);

std::uint64_t for_loop(const PathState& st, Fxp81 ccs, const ExpCoeffs& k = kExpCoeffs);

CmpResult cmp(std::uint64_t y, int s, ByteSource& src);

double fpr_add(int z, std::int64_t floor_mu, const GaussLut& lut);

struct AttemptRecord
{
  int z0 = 0;
  int b = 0;
  int s = 0;
  bool accept = false;
};

struct SamplerZResult
{
  std::int64_t value = 0;
  int attempts = 0;
  std::vector<AttemptRecord> log;
};

inline constexpr int kMaxAttempts = 10000;

// Single-path Fxp81 pipeline: draw_candidate, bef_loop, for_loop, cmp until
// accept. Throws std::runtime_error after kMaxAttempts rejections.
SamplerZResult samplerz_fixed(double mu, double sigma_prime, ByteSource& src, const KernelConfig& cfg);

// Double-precision reference of the same algorithm over the same bytes.
SamplerZResult samplerz_oracle(double mu, double sigma_prime, ByteSource& src, const KernelConfig& cfg);

} // namespace bisampler
