#include "bisampler/rcdt.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <nlohmann/json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace bisampler {

namespace {

constexpr uint128 u72(std::uint64_t hi, std::uint64_t lo)
{
  return (uint128(hi) << 64) | lo;
}

std::string to_decimal(uint128 v)
{
  if (v == 0)
    return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

uint128 parse_decimal(const std::string& s)
{
  if (s.empty() || s.size() > 22)
    throw std::invalid_argument("RCDT entry: bad decimal length");
  uint128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("RCDT entry: non-digit");
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  return v;
}

} // namespace

void Rcdt::validate() const
{
  if (entries[0] >= kScale)
    throw std::invalid_argument("RCDT: entries[0] must be below 2^72");
  for (std::size_t i = 0; i + 1 < kSize; ++i)
    if (entries[i] <= entries[i + 1])
      throw std::invalid_argument("RCDT: entries must be strictly decreasing");
  if (entries[kSize - 1] == 0)
    throw std::invalid_argument("RCDT: last entry must be positive");
}

std::uint64_t Rcdt::checksum() const noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (uint128 e : entries) {
    for (int b = 0; b < 9; ++b) {
      h ^= static_cast<std::uint8_t>(e >> (8 * b));
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string Rcdt::to_json() const
{
  nlohmann::json arr = nlohmann::json::array();
  for (uint128 e : entries)
    arr.push_back(to_decimal(e));
  return arr.dump();
}

Rcdt Rcdt::from_json(const std::string& text)
{
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array() || arr.size() != kSize)
    throw std::invalid_argument("RCDT JSON: expected an array of 18 strings");
  Rcdt t;
  for (std::size_t i = 0; i < kSize; ++i)
    t.entries[i] = parse_decimal(arr[i].get<std::string>());
  t.validate();
  return t;
}

const Rcdt& default_rcdt() noexcept
{
  static const Rcdt table{ {
    u72(0xa3, 0xf7f42ed3ac39180aULL),
    u72(0x54, 0xd32b181f3f7ddb8aULL),
    u72(0x22, 0x7dcdd0934829c206ULL),
    u72(0x0a, 0xd1754377c7994aeaULL),
    u72(0x02, 0x95846caef33f1f75ULL),
    u72(0x00, 0x774ac754ed74bd64ULL),
    u72(0x00, 0x1024dd542b776ae9ULL),
    u72(0x00, 0x01a1ffdc65ad63dfULL),
    u72(0x00, 0x001f80d88a7b642cULL),
    u72(0x00, 0x0001c3fdb2040c6dULL),
    u72(0x00, 0x000012cf24d031feULL),
    u72(0x00, 0x000000949f8b0922ULL),
    u72(0x00, 0x00000003665da99aULL),
    u72(0x00, 0x000000000ebf6ebcULL),
    u72(0x00, 0x00000000002f5d7fULL),
    u72(0x00, 0x0000000000007099ULL),
    u72(0x00, 0x00000000000000c6ULL),
    u72(0x00, 0x0000000000000001ULL),
  } };
  return table;
}

Rcdt make_rcdt(double sigma_max)
{
  using big = boost::multiprecision::cpp_bin_float_50;
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max))
    throw std::invalid_argument("make_rcdt: sigma_max must be positive");
  constexpr int kTerms = 64;
  // the decimal the user wrote, not its binary approximation
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, sigma_max);
  const big sm(std::string(buf, res.ptr));
  const big inv = big(1) / (2 * sm * sm);
  std::array<big, kTerms + 1> w;
  for (int k = 0; k <= kTerms; ++k)
    w[static_cast<std::size_t>(k)] = exp(-big(k * k) * inv);
  big total = 0;
  for (const auto& v : w)
    total += v;
  Rcdt t;
  big tail = total - w[0];
  const big scale = ldexp(big(1), 72);
  for (std::size_t i = 0; i < Rcdt::kSize; ++i) {
    const big q = floor(tail / total * scale + big(0.5));
    t.entries[i] = (uint128(static_cast<std::uint64_t>(floor(q / ldexp(big(1), 64)))) << 64) |
                   static_cast<std::uint64_t>(fmod(q, ldexp(big(1), 64)));
    tail -= w[i + 1];
  }
  t.validate();
  return t;
}

std::uint32_t comparison_bits(uint128 u, const Rcdt& t) noexcept
{
  std::uint32_t c = 0;
  for (std::size_t i = 0; i < Rcdt::kSize; ++i)
    c |= static_cast<std::uint32_t>(u < t.entries[i]) << i;
  return c;
}

int z0_counter(uint128 u, const Rcdt& t) noexcept
{
  int z0 = 0;
  for (uint128 e : t.entries)
    z0 += static_cast<int>(u < e);
  return z0;
}

int z0_scan(uint128 u, const Rcdt& t) noexcept
{
  const std::uint32_t c = comparison_bits(u, t);
  // edge bit i: c_i = 1 and c_{i+1} = 0 (c_18 reads as 0)
  const std::uint32_t edge = c & ~(c >> 1);
  // Monotone comparison bits leave at most one edge enabled, so exactly one
  // index driver (or none) is selected.
  return edge == 0 ? 0 : std::countr_zero(edge) + 1;
}

int z0_priority(uint128 u, const Rcdt& t) noexcept
{
  return std::countr_one(comparison_bits(u, t));
}

std::pair<int, int> sample_pair(uint128 u_lo, uint128 u_hi, const Rcdt& t) noexcept
{
  return { z0_scan(u_lo, t), z0_scan(u_hi, t) };
}

std::array<double, Rcdt::kSize + 1> rcdt_pmf(const Rcdt& t)
{
  std::array<double, Rcdt::kSize + 1> p{};
  uint128 prev = Rcdt::kScale;
  for (std::size_t i = 0; i < Rcdt::kSize; ++i) {
    p[i] = std::ldexp(static_cast<double>(prev - t.entries[i]), -72);
    prev = t.entries[i];
  }
  p[Rcdt::kSize] = std::ldexp(static_cast<double>(prev), -72);
  return p;
}

} // namespace bisampler
