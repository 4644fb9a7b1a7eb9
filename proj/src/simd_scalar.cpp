#include "bisampler/simd.hpp"

namespace bisampler::simd::scalar {

void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t) noexcept
{
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = static_cast<std::uint8_t>(z0_scan(u[i], t));
}

void approx_exp_batch(std::span<const std::uint64_t> z,
                      std::span<const std::uint64_t> ccs_int,
                      std::span<std::uint64_t> out) noexcept
{
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = approx_exp(z[i], ccs_int[i]);
}

} // namespace bisampler::simd::scalar
