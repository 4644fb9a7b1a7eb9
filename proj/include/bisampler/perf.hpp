#pragma once
#include "bisampler/fsm.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bisampler {

// Rejection counts 0..5 and >= 6 of a single-path execution, as fractions.
inline constexpr std::array<double, 7> kReferenceFailureRatios = { 0.5758, 0.2439, 0.1047, 0.0436, 0.0189, 0.0072, 0.0059 };

struct RejectionModel
{
  enum class Mode
  {
    geometric,
    empirical
  };

  double p_accept = 0.5758;
  Mode mode = Mode::geometric;
  std::array<double, 7> histogram = kReferenceFailureRatios;

  // Throws std::invalid_argument unless 0 < p_accept <= 1 and, in empirical
  // mode, the histogram is nonnegative and sums to 1 within 1e-6.
  void validate() const;

  // Per-attempt acceptance probabilities. Geometric: {p}. Empirical: the
  // hazard rates of bins 0..5 followed by p_accept for the >= 6 tail.
  std::vector<double> hazard() const;
};

const char* mode_name(RejectionModel::Mode m) noexcept;

struct LatencyReport
{
  std::string design;
  double expected_cycles = 0.0;
  double rejection_free_cycles = 0.0;
  std::uint64_t trials = 0;
  double stddev = 0.0;
  double half_width = 0.0; // 95% confidence
  std::string calibration;
};

// Streaming mean/variance of per-trial cycle totals.
class LatencyAccumulator
{
public:
  void add(double v) noexcept;
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double stddev() const noexcept;
  double half_width95() const noexcept;

private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

using TraceSink = std::function<void(const FsmTrace&)>;

// Drives the FSM with synthetic decisions from `model`. Every trace is
// passed to `sink` when one is given.
LatencyReport expected_cycles_bi(Policy policy,
                                 const RejectionModel& model,
                                 std::uint64_t trials,
                                 std::uint64_t seed,
                                 const TraceSink& sink = {},
                                 const CycleCosts& costs = {});

struct FalconSignCosts
{
  int pre_samp = 11;
  int samp_loop = 16;
  std::array<int, 2> berexp_first = { 41, 42 }; // first attempt of sampling 1 and 2
  int berexp_retry = 47;
  int berexp_max = 47;

  int rejection_free() const noexcept
  {
    return 2 * (pre_samp + samp_loop) + berexp_first[0] + berexp_first[1];
  }
  std::string calibration() const;
};

// Two sequential single-path samplings, each 11 + sum over attempts of
// (16 + BerExp cost).
LatencyReport expected_cycles_falconsign(const RejectionModel& model,
                                         std::uint64_t trials,
                                         std::uint64_t seed,
                                         const FalconSignCosts& costs = {});

struct OutcomeProbabilities
{
  double both = 0.0;
  double neither = 0.0;
  double exactly_one = 0.0;
};

// (p^2, (1-p)^2, 2p(1-p)). Throws std::invalid_argument outside [0, 1].
OutcomeProbabilities outcome_probabilities(double p);

// Table with the normalized_latency column relative to `reference`.
std::string latency_csv(const std::vector<LatencyReport>& rows, const std::string& reference);
std::string latency_json(const std::vector<LatencyReport>& rows, const std::string& reference);

} // namespace bisampler
