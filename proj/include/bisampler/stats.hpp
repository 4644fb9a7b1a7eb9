#pragma once
#include "bisampler/fsm.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bisampler {

// Probability mass over the integers lo .. lo + p.size() - 1.
struct Pmf
{
  std::int64_t lo = 0;
  std::vector<double> p;

  std::int64_t hi() const noexcept { return lo + static_cast<std::int64_t>(p.size()) - 1; }
  double at(std::int64_t k) const noexcept;
};

inline constexpr int kSupportRadius = 30;

// exp(-(k - mu)^2 / (2 sigma^2)) normalized over [lo, hi]. Throws
// std::invalid_argument unless the range covers floor(mu) +- 30.
Pmf target_pmf(double mu, double sigma, std::int64_t lo, std::int64_t hi);
Pmf target_pmf(double mu, double sigma);

// Integer histogram over a fixed support; values outside land in `outside`.
class Histogram
{
public:
  Histogram(std::int64_t lo, std::int64_t hi);
  void add(std::int64_t v) noexcept;
  void merge(const Histogram& o);
  std::int64_t lo() const noexcept { return lo_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t outside() const noexcept { return outside_; }
  std::uint64_t total() const noexcept { return total_; }

private:
  std::int64_t lo_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t outside_ = 0;
  std::uint64_t total_ = 0;
};

struct ChiSquareResult
{
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins = 0; // after merging
};

inline constexpr std::uint64_t kMinChiSquareSamples = 10000;

// Pearson statistic against N * expected, N = sum(observed). Adjacent bins
// are merged left to right until each expected count reaches 5; a short tail
// joins the last bin. Throws std::invalid_argument when N < 10^4, the spans
// differ in length, or fewer than two bins remain.
ChiSquareResult chi_square(std::span<const std::uint64_t> observed, std::span<const double> expected);

struct DistReport
{
  std::string label;
  double mu = 0.0;
  double sigma = 0.0;
  std::int64_t support_lo = 0;
  std::vector<double> empirical;
  std::vector<double> target;
  std::uint64_t samples = 0;
  std::uint64_t outside = 0;
  ChiSquareResult chi;
  double renyi2 = 0.0; // informational
  double alpha = 0.01;
  bool passed = false;
};

DistReport dist_report(const std::string& label, const Histogram& h, const Pmf& target, double alpha = 0.01);

// Order-2 Renyi divergence of the empirical PMF from the target.
double renyi_divergence2(std::span<const double> empirical, std::span<const double> target);

struct FailureHistogram
{
  static constexpr std::size_t kBins = 7; // 0..5 rejections, >= 6

  std::array<std::uint64_t, kBins> counts{};
  std::uint64_t total = 0;

  void add(int rejections) noexcept;
  double ratio(std::size_t bin) const noexcept;
};

// One execution per sample: retries_l and retries_r of each trace.
FailureHistogram failure_histogram(std::span<const FsmTrace> traces);

struct AssistCounter
{
  std::uint64_t rounds = 0;
  std::uint64_t success = 0;
  void add(const FsmTrace& t) noexcept;
};

inline constexpr std::uint64_t kMinAloopRounds = 10000;

// Share of ALOOP rounds that end in F_ADD. Throws std::invalid_argument
// below 10^4 rounds.
double assisted_success_rate(const AssistCounter& c);
double assisted_success_rate(std::span<const FsmTrace> traces);

// Sample counts of a multinomial(n, p) draw.
std::vector<std::uint64_t> sample_multinomial(std::span<const double> p, std::uint64_t n, std::mt19937_64& gen);

std::string to_json(const DistReport& r);
std::string to_json(const FailureHistogram& h);

// Aligned text tables.
std::string failure_table_text(const FailureHistogram& h);
std::string dist_table_text(const std::vector<DistReport>& reports);

} // namespace bisampler
