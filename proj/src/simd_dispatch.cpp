#include "bisampler/simd.hpp"

#include <cstdlib>
#include <stdexcept>

namespace bisampler::simd {

namespace {

void check_sizes(std::size_t a, std::size_t b)
{
  if (a != b)
    throw std::invalid_argument("simd: input and output spans differ in length");
}

} // namespace

const char* isa_name(Isa isa) noexcept
{
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() noexcept
{
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  if (has_avx2)
    return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa active_isa() noexcept
{
  static const Isa isa = [] {
    const char* force = std::getenv("BISAMPLER_FORCE_SCALAR");
    if (force != nullptr && force[0] != '\0' && force[0] != '0')
      return Isa::scalar;
    return detected_isa();
  }();
  return isa;
}

bool isa_available(Isa isa) noexcept
{
  return isa == Isa::scalar || detected_isa() == isa;
}

void z0_batch(std::span<const uint128> u, std::span<std::uint8_t> out, const Rcdt& t, Isa isa)
{
  check_sizes(u.size(), out.size());
  if (!isa_available(isa))
    throw std::invalid_argument("simd: requested ISA not supported by this CPU");
#if defined(__x86_64__)
  if (isa == Isa::avx2) {
    avx2::z0_batch(u, out, t);
    return;
  }
#endif
  scalar::z0_batch(u, out, t);
}

void approx_exp_batch(std::span<const std::uint64_t> z,
                      std::span<const std::uint64_t> ccs_int,
                      std::span<std::uint64_t> out,
                      Isa isa)
{
  check_sizes(z.size(), out.size());
  check_sizes(ccs_int.size(), out.size());
  if (!isa_available(isa))
    throw std::invalid_argument("simd: requested ISA not supported by this CPU");
#if defined(__x86_64__)
  if (isa == Isa::avx2) {
    avx2::approx_exp_batch(z, ccs_int, out);
    return;
  }
#endif
  scalar::approx_exp_batch(z, ccs_int, out);
}

} // namespace bisampler::simd
