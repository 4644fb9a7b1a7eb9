#pragma once
#include "bisampler/fxp81.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bisampler {

using Seed256 = std::array<std::uint8_t, 32>;
using ChaChaBlock = std::array<std::uint8_t, 64>;

// Parses exactly 64 hex characters.
Seed256 parse_seed(std::string_view hex);
std::string seed_to_hex(const Seed256& seed);

// ChaCha20 block function. The 64-bit counter occupies state words 12..13
// and the nonce words 14..15; with a zero nonce and counter < 2^32 this
// equals the RFC 7539 layout.
ChaChaBlock chacha20_block(const Seed256& key, std::uint64_t counter, std::uint64_t nonce = 0);

// RFC 7539 layout (32-bit counter, 96-bit nonce), kept for test vectors.
ChaChaBlock chacha20_block_rfc7539(const Seed256& key,
                                   std::uint32_t counter,
                                   const std::array<std::uint8_t, 12>& nonce);

// Keystream generator positioned at block 0.
class PrngCore
{
public:
  explicit PrngCore(const Seed256& seed)
    : key_(seed)
  {
  }

  ChaChaBlock block(std::uint64_t counter) const { return chacha20_block(key_, counter); }

  // Sequential byte stream: block 0, block 1, ...
  std::uint8_t next_byte();

  const Seed256& seed() const noexcept { return key_; }

private:
  Seed256 key_;
  std::uint64_t counter_ = 0;
  ChaChaBlock cache_{};
  std::size_t pos_ = 64;
};

// Source of uniformly random bytes consumed by a sampling path.
class ByteSource
{
public:
  virtual ~ByteSource() = default;
  virtual std::uint8_t next_byte() = 0;
};

enum class Lane : std::uint8_t
{
  left = 0,
  right = 1
};

constexpr const char* lane_name(Lane l) noexcept
{
  return l == Lane::left ? "left" : "right";
}

// Per-lane refill buffers fed from one keystream. Keystream block 2k goes to
// the left lane and block 2k+1 to the right lane, so the lanes never share a
// byte and each lane's sequence is independent of the other's consumption.
class LaneRandom
{
public:
  static constexpr std::size_t kLowWatermark = 32;

  explicit LaneRandom(const Seed256& seed)
    : core_(seed)
  {
  }

  std::uint8_t uniform_bits8(Lane lane);

  // Nine bytes from one lane, little-endian.
  uint128 uniform_bits72(Lane lane);

  // Bytes 0..8 from the left lane, 9..17 from the right lane, assembled
  // little-endian: low half = u[0:71], high half = u[72:143].
  struct U144
  {
    uint128 lo;
    uint128 hi;
  };
  U144 uniform_u144();

  // Refill any lane below the low watermark.
  void top_up();

  std::uint64_t bytes_generated(Lane lane) const noexcept { return lanes_[idx(lane)].generated; }
  std::uint64_t bytes_consumed(Lane lane) const noexcept { return lanes_[idx(lane)].consumed; }
  std::size_t bytes_buffered(Lane lane) const noexcept { return lanes_[idx(lane)].buffer.size(); }
  std::uint64_t blocks_generated() const noexcept
  {
    return lanes_[0].next_block + lanes_[1].next_block;
  }

  const Seed256& seed() const noexcept { return core_.seed(); }

private:
  struct LaneState
  {
    std::deque<std::uint8_t> buffer;
    std::uint64_t next_block = 0; // k-th block of this lane = keystream block 2k + lane
    std::uint64_t generated = 0;
    std::uint64_t consumed = 0;
  };

  static constexpr std::size_t idx(Lane l) noexcept { return static_cast<std::size_t>(l); }
  void refill(Lane lane);
  void ensure(Lane lane, std::size_t n);
  std::uint8_t take(Lane lane);

  PrngCore core_;
  std::array<LaneState, 2> lanes_{};
};

// ByteSource view over one lane.
class LaneSource final : public ByteSource
{
public:
  LaneSource(LaneRandom& random, Lane lane)
    : random_(&random)
    , lane_(lane)
  {
  }
  std::uint8_t next_byte() override { return random_->uniform_bits8(lane_); }

private:
  LaneRandom* random_;
  Lane lane_;
};

// Replays a fixed byte sequence; throws std::out_of_range when exhausted.
class ScriptedBytes final : public ByteSource
{
public:
  explicit ScriptedBytes(std::vector<std::uint8_t> bytes)
    : bytes_(std::move(bytes))
  {
  }
  std::uint8_t next_byte() override;
  std::size_t consumed() const noexcept { return pos_; }

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Assembles 9 bytes little-endian into a 72-bit value.
uint128 le_bytes_to_u72(std::span<const std::uint8_t, 9> bytes) noexcept;

} // namespace bisampler
