#pragma once
#include "bisampler/fsm.hpp"
#include "bisampler/kernel.hpp"
#include "bisampler/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace bisampler {

// Distribution of task centers: "fixed:a,b" (mu_l = a, mu_r = b) or
// "uniform:lo,hi" (each center uniform in [lo, hi)).
struct MuDist
{
  enum class Kind
  {
    fixed,
    uniform
  };
  Kind kind = Kind::uniform;
  double a = -64.0;
  double b = 64.0;

  std::string to_string() const;
};

// Throws std::invalid_argument on malformed text.
MuDist parse_mu_dist(std::string_view text);

// Deterministic task stream. sigma_prime is fixed when given, else uniform
// in [sigma_min, sigma_max].
class TaskSource
{
public:
  TaskSource(const Seed256& seed, MuDist mu, const ParamSet& params, std::optional<double> sigma);
  SampleTask next();

private:
  std::mt19937_64 gen_;
  MuDist mu_;
  ParamSet params_;
  std::optional<double> sigma_;
};

std::mt19937_64 seeded_engine(const Seed256& seed, std::uint32_t stream = 0);

// Independent 256-bit seed for sub-campaign `stream`.
Seed256 derive_seed(const Seed256& seed, std::uint32_t stream);

struct GoldenVector
{
  Seed256 seed{};
  double mu_l = 0.0;
  double mu_r = 0.0;
  double sigma = 0.0;
  double z_l = 0.0;
  double z_r = 0.0;
  std::uint64_t bytes_l = 0;
  std::uint64_t bytes_r = 0;

  friend bool operator==(const GoldenVector&, const GoldenVector&) = default;
};

// One task on a fresh machine seeded with `seed`, with assistance.
GoldenVector compute_vector(const Seed256& seed, const SampleTask& task, const KernelConfig& cfg);

// "seed mu_l mu_r sigma z_l z_r bytes_l bytes_r", space separated; doubles in
// shortest round-trip form.
std::string format_vector(const GoldenVector& v);
GoldenVector parse_vector(std::string_view line);

// n vectors whose per-vector seeds and tasks derive from `base`.
std::vector<GoldenVector> generate_vectors(const Seed256& base, std::size_t n, const KernelConfig& cfg);

struct VectorCheck
{
  std::size_t total = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> details;
};

// Recomputes every non-comment line of `in` and compares.
VectorCheck check_vectors(std::istream& in, const KernelConfig& cfg);

} // namespace bisampler
