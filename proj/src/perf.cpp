#include "bisampler/perf.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bisampler {

namespace {

std::string fixed6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const LatencyReport& find_reference(const std::vector<LatencyReport>& rows, const std::string& reference)
{
  for (const auto& r : rows)
    if (r.design == reference)
      return r;
  throw std::invalid_argument("latency table: reference design not present: " + reference);
}

} // namespace

void RejectionModel::validate() const
{
  if (!(p_accept > 0.0 && p_accept <= 1.0))
    throw std::invalid_argument("rejection model: p_accept must lie in (0, 1]");
  if (mode == Mode::empirical) {
    double sum = 0.0;
    for (double h : histogram) {
      if (!(h >= 0.0))
        throw std::invalid_argument("rejection model: negative histogram entry");
      sum += h;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("rejection model: histogram does not sum to 1");
  }
}

std::vector<double> RejectionModel::hazard() const
{
  validate();
  if (mode == Mode::geometric)
    return { p_accept };
  std::vector<double> h;
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < histogram.size(); ++k) {
    h.push_back(remaining > 0.0 ? std::min(1.0, histogram[k] / remaining) : 1.0);
    remaining -= histogram[k];
  }
  h.push_back(p_accept);
  return h;
}

const char* mode_name(RejectionModel::Mode m) noexcept
{
  return m == RejectionModel::Mode::geometric ? "geometric" : "empirical";
}

void LatencyAccumulator::add(double v) noexcept
{
  ++n_;
  const double d = v - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (v - mean_);
}

double LatencyAccumulator::stddev() const noexcept
{
  return n_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(n_ - 1));
}

double LatencyAccumulator::half_width95() const noexcept
{
  return n_ == 0 ? 0.0 : 1.959963984540054 * stddev() / std::sqrt(static_cast<double>(n_));
}

LatencyReport expected_cycles_bi(Policy policy,
                                 const RejectionModel& model,
                                 std::uint64_t trials,
                                 std::uint64_t seed,
                                 const TraceSink& sink,
                                 const CycleCosts& costs)
{
  if (trials == 0)
    throw std::invalid_argument("expected_cycles_bi: zero trials");
  SyntheticDatapath dp(model.hazard(), seed);
  BiSampler fsm(dp, policy, costs);
  LatencyAccumulator acc;
  const SampleTask task{ 0.0, 0.0, 1.5 };
  for (std::uint64_t i = 0; i < trials; ++i) {
    const TaskResult r = fsm.run_task(task, i + 1 < trials);
    acc.add(static_cast<double>(r.trace.total_cycles));
    if (sink)
      sink(r.trace);
  }
  LatencyReport rep;
  rep.design = policy == Policy::with_assist ? "bi_with_assist" : "bi_without_assist";
  rep.expected_cycles = acc.mean();
  rep.rejection_free_cycles = costs.rejection_free();
  rep.trials = trials;
  rep.stddev = acc.stddev();
  rep.half_width = acc.half_width95();
  std::ostringstream cal;
  cal << "pre=" << costs.pre << ",nreg=" << costs.nreg << ",loop=" << costs.loop_base << "/" << costs.loop_max
      << ",switch=" << costs.switch_ << ",f_add=" << costs.f_add;
  rep.calibration = cal.str();
  return rep;
}

std::string FalconSignCosts::calibration() const
{
  std::ostringstream s;
  s << "pre_samp=" << pre_samp << ",samp_loop=" << samp_loop << ",berexp_first=" << berexp_first[0] << "/"
    << berexp_first[1] << ",berexp_retry=" << berexp_retry;
  return s.str();
}

LatencyReport expected_cycles_falconsign(const RejectionModel& model,
                                         std::uint64_t trials,
                                         std::uint64_t seed,
                                         const FalconSignCosts& costs)
{
  if (trials == 0)
    throw std::invalid_argument("expected_cycles_falconsign: zero trials");
  const std::vector<double> hazard = model.hazard();
  std::mt19937_64 gen(seed);
  LatencyAccumulator acc;
  for (std::uint64_t i = 0; i < trials; ++i) {
    int total = 0;
    for (std::size_t call = 0; call < 2; ++call) {
      total += costs.pre_samp;
      for (int attempt = 0;; ++attempt) {
        if (attempt >= kMaxAttempts)
          throw std::runtime_error("expected_cycles_falconsign: attempt cap reached");
        total += costs.samp_loop + (attempt == 0 ? costs.berexp_first[call] : costs.berexp_retry);
        std::bernoulli_distribution d(hazard[std::min<std::size_t>(static_cast<std::size_t>(attempt), hazard.size() - 1)]);
        if (d(gen))
          break;
      }
    }
    acc.add(total);
  }
  LatencyReport rep;
  rep.design = "falconsign_model";
  rep.expected_cycles = acc.mean();
  rep.rejection_free_cycles = costs.rejection_free();
  rep.trials = trials;
  rep.stddev = acc.stddev();
  rep.half_width = acc.half_width95();
  rep.calibration = costs.calibration();
  return rep;
}

OutcomeProbabilities outcome_probabilities(double p)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("outcome_probabilities: p outside [0, 1]");
  return { p * p, (1.0 - p) * (1.0 - p), 2.0 * p * (1.0 - p) };
}

std::string latency_csv(const std::vector<LatencyReport>& rows, const std::string& reference)
{
  const double ref = find_reference(rows, reference).expected_cycles;
  std::ostringstream out;
  out << "design,expected_cycles,cycles_wo_rejection,normalized_latency,trials,half_width_95\n";
  for (const auto& r : rows)
    out << r.design << ',' << fixed6(r.expected_cycles) << ',' << fixed6(r.rejection_free_cycles) << ','
        << fixed6(r.expected_cycles / ref) << ',' << r.trials << ',' << fixed6(r.half_width) << '\n';
  return out.str();
}

std::string latency_json(const std::vector<LatencyReport>& rows, const std::string& reference)
{
  const double ref = find_reference(rows, reference).expected_cycles;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["design"] = r.design;
    j["expected_cycles"] = std::stod(fixed6(r.expected_cycles));
    j["cycles_wo_rejection"] = std::stod(fixed6(r.rejection_free_cycles));
    j["normalized_latency"] = std::stod(fixed6(r.expected_cycles / ref));
    j["trials"] = r.trials;
    j["half_width_95"] = std::stod(fixed6(r.half_width));
    j["calibration"] = r.calibration;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

} // namespace bisampler
