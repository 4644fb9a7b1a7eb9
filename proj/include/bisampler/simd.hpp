#pragma once
#include "bisampler/approx_exp.hpp"
#include "bisampler/rcdt.hpp"

#include <cstdint>
#include <span>

// Batched data-parallel kernels. Each kernel has a scalar reference and an
// AVX2 variant; the variant is chosen at runtime from the CPU features.
namespace bisampler::simd {

enum class Isa
{
  scalar,
  avx2
};

const char* isa_name(Isa isa) noexcept;

// Best ISA the running CPU supports.
Isa detected_isa() noexcept;

// detected_isa(), unless BISAMPLER_FORCE_SCALAR is set in the environment.
Isa active_isa() noexcept;

bool isa_available(Isa isa) noexcept;

// out[i] = z0 for u[i] (72-bit values). Sizes must match.
void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t, Isa isa);
inline void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t)
{
  z0_batch(u, out, t, active_isa());
}

// out[i] = approx_exp(z[i], ccs_int[i]). Requires z[i] < 2^63 and
// ccs_int[i] <= 2^63.
void approx_exp_batch(std::span<const std::uint64_t> z,
                      std::span<const std::uint64_t> ccs_int,
                      std::span<std::uint64_t> out,
                      Isa isa);
inline void approx_exp_batch(std::span<const std::uint64_t> z,
                             std::span<const std::uint64_t> ccs_int,
                             std::span<std::uint64_t> out)
{
  approx_exp_batch(z, ccs_int, out, active_isa());
}

namespace scalar {
void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t) noexcept;
void approx_exp_batch(std::span<const std::uint64_t> z,
                      std::span<const std::uint64_t> ccs_int,
                      std::span<std::uint64_t> out) noexcept;
} // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t) noexcept;
void approx_exp_batch(std::span<const std::uint64_t> z,
                      std::span<const std::uint64_t> ccs_int,
                      std::span<std::uint64_t> out) noexcept;
} // namespace avx2
#endif

} // namespace bisampler::simd
