#pragma once
#include "bisampler/fxp81.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>

namespace bisampler {

// Reverse cumulative distribution table of the half-Gaussian with
// parameter sigma_max: entries[i] = 2^72 * P(z0 >= i + 1), strictly
// decreasing, entries[0] < 2^72, entries[17] > 0.
struct Rcdt
{
  static constexpr std::size_t kSize = 18;
  static constexpr uint128 kScale = uint128(1) << 72;

  std::array<uint128, kSize> entries{};

  // Throws std::invalid_argument unless the invariants above hold.
  void validate() const;

  // FNV-1a over the 9-byte little-endian encoding of each entry.
  std::uint64_t checksum() const noexcept;

  // JSON array of 18 decimal strings.
  std::string to_json() const;
  static Rcdt from_json(const std::string& text);

  friend bool operator==(const Rcdt&, const Rcdt&) = default;
};

// Table for sigma_max = 1.8205 (round-to-nearest of the exact tail mass).
const Rcdt& default_rcdt() noexcept;
inline constexpr std::uint64_t kDefaultRcdtChecksum = 0x6fdaa8c3f492c0fbULL;

// Table for an arbitrary sigma_max, from a 50-digit evaluation of the tail
// sums rounded to nearest. Throws std::invalid_argument when the result
// violates the invariants (sigma_max too small for 18 positive entries).
Rcdt make_rcdt(double sigma_max);

// Bit i set iff u < entries[i]. Always a run of ones starting at bit 0.
std::uint32_t comparison_bits(uint128 u, const Rcdt& t) noexcept;

// Counter-sum form: |{ i : u < entries[i] }|.
int z0_counter(uint128 u, const Rcdt& t) noexcept;

// Transition-scan form: locates the single 1 -> 0 edge of the comparison
// bits and returns its position; 0 for an empty run, 18 for a full run.
int z0_scan(uint128 u, const Rcdt& t) noexcept;

// Priority-encoder form: index of the first 0 comparison bit.
int z0_priority(uint128 u, const Rcdt& t) noexcept;

// Applies z0_scan to u[0:71] and u[72:143].
std::pair<int, int> sample_pair(uint128 u_lo, uint128 u_hi, const Rcdt& t) noexcept;

// P(z0 = i) implied by the table, i in [0, 18].
std::array<double, Rcdt::kSize + 1> rcdt_pmf(const Rcdt& t);

} // namespace bisampler
