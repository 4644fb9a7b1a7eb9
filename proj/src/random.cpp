#include "bisampler/random.hpp"

#include <bit>
#include <stdexcept>

namespace bisampler {

namespace {

constexpr std::uint32_t load_le32(const std::uint8_t* p) noexcept
{
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

inline void quarter_round(std::array<std::uint32_t, 16>& x, int a, int b, int c, int d) noexcept
{
  x[a] += x[b];
  x[d] = std::rotl(x[d] ^ x[a], 16);
  x[c] += x[d];
  x[b] = std::rotl(x[b] ^ x[c], 12);
  x[a] += x[b];
  x[d] = std::rotl(x[d] ^ x[a], 8);
  x[c] += x[d];
  x[b] = std::rotl(x[b] ^ x[c], 7);
}

ChaChaBlock chacha20_core(const std::array<std::uint32_t, 16>& input) noexcept
{
  auto x = input;
  for (int i = 0; i < 10; ++i) {
    quarter_round(x, 0, 4, 8, 12);
    quarter_round(x, 1, 5, 9, 13);
    quarter_round(x, 2, 6, 10, 14);
    quarter_round(x, 3, 7, 11, 15);
    quarter_round(x, 0, 5, 10, 15);
    quarter_round(x, 1, 6, 11, 12);
    quarter_round(x, 2, 7, 8, 13);
    quarter_round(x, 3, 4, 9, 14);
  }
  ChaChaBlock out{};
  for (std::size_t i = 0; i < 16; ++i) {
    const std::uint32_t v = x[i] + input[i];
    out[4 * i + 0] = static_cast<std::uint8_t>(v);
    out[4 * i + 1] = static_cast<std::uint8_t>(v >> 8);
    out[4 * i + 2] = static_cast<std::uint8_t>(v >> 16);
    out[4 * i + 3] = static_cast<std::uint8_t>(v >> 24);
  }
  return out;
}

std::array<std::uint32_t, 16> initial_state(const Seed256& key) noexcept
{
  std::array<std::uint32_t, 16> s{};
  s[0] = 0x61707865;
  s[1] = 0x3320646e;
  s[2] = 0x79622d32;
  s[3] = 0x6b206574;
  for (std::size_t i = 0; i < 8; ++i)
    s[4 + i] = load_le32(key.data() + 4 * i);
  return s;
}

int hex_value(char c)
{
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

} // namespace

Seed256 parse_seed(std::string_view hex)
{
  if (hex.size() != 64)
    throw std::invalid_argument("seed must be 64 hex characters");
  Seed256 seed{};
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
      throw std::invalid_argument("seed contains a non-hex character");
    seed[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return seed;
}

std::string seed_to_hex(const Seed256& seed)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : seed) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

ChaChaBlock chacha20_block(const Seed256& key, std::uint64_t counter, std::uint64_t nonce)
{
  auto s = initial_state(key);
  s[12] = static_cast<std::uint32_t>(counter);
  s[13] = static_cast<std::uint32_t>(counter >> 32);
  s[14] = static_cast<std::uint32_t>(nonce);
  s[15] = static_cast<std::uint32_t>(nonce >> 32);
  return chacha20_core(s);
}

ChaChaBlock chacha20_block_rfc7539(const Seed256& key,
                                   std::uint32_t counter,
                                   const std::array<std::uint8_t, 12>& nonce)
{
  auto s = initial_state(key);
  s[12] = counter;
  s[13] = load_le32(nonce.data());
  s[14] = load_le32(nonce.data() + 4);
  s[15] = load_le32(nonce.data() + 8);
  return chacha20_core(s);
}

std::uint8_t PrngCore::next_byte()
{
  if (pos_ == cache_.size()) {
    cache_ = block(counter_++);
    pos_ = 0;
  }
  return cache_[pos_++];
}

void LaneRandom::refill(Lane lane)
{
  auto& st = lanes_[idx(lane)];
  const auto blk = core_.block(2 * st.next_block + idx(lane));
  ++st.next_block;
  st.buffer.insert(st.buffer.end(), blk.begin(), blk.end());
  st.generated += blk.size();
}

void LaneRandom::ensure(Lane lane, std::size_t n)
{
  while (lanes_[idx(lane)].buffer.size() < n)
    refill(lane);
}

std::uint8_t LaneRandom::take(Lane lane)
{
  auto& st = lanes_[idx(lane)];
  const std::uint8_t v = st.buffer.front();
  st.buffer.pop_front();
  ++st.consumed;
  return v;
}

void LaneRandom::top_up()
{
  for (Lane l : { Lane::left, Lane::right })
    if (lanes_[idx(l)].buffer.size() < kLowWatermark)
      refill(l);
}

std::uint8_t LaneRandom::uniform_bits8(Lane lane)
{
  ensure(lane, 1);
  const std::uint8_t v = take(lane);
  if (lanes_[idx(lane)].buffer.size() < kLowWatermark)
    refill(lane);
  return v;
}

uint128 LaneRandom::uniform_bits72(Lane lane)
{
  // Served atomically: the nine bytes are in the buffer before any is taken.
  ensure(lane, 9);
  std::array<std::uint8_t, 9> b{};
  for (auto& v : b)
    v = take(lane);
  if (lanes_[idx(lane)].buffer.size() < kLowWatermark)
    refill(lane);
  return le_bytes_to_u72(b);
}

LaneRandom::U144 LaneRandom::uniform_u144()
{
  const uint128 lo = uniform_bits72(Lane::left);
  const uint128 hi = uniform_bits72(Lane::right);
  return { lo, hi };
}

std::uint8_t ScriptedBytes::next_byte()
{
  if (pos_ >= bytes_.size())
    throw std::out_of_range("ScriptedBytes: script exhausted");
  return bytes_[pos_++];
}

uint128 le_bytes_to_u72(std::span<const std::uint8_t, 9> bytes) noexcept
{
  uint128 v = 0;
  for (std::size_t i = 9; i-- > 0;)
    v = (v << 8) | bytes[i];
  return v;
}

} // namespace bisampler
