#include "bisampler/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bisampler {

double Pmf::at(std::int64_t k) const noexcept
{
  if (k < lo || k > hi())
    return 0.0;
  return p[static_cast<std::size_t>(k - lo)];
}

Pmf target_pmf(double mu, double sigma, std::int64_t lo, std::int64_t hi)
{
  if (!std::isfinite(mu) || !(sigma > 0.0))
    throw std::invalid_argument("target_pmf: bad mu or sigma");
  const auto fl = static_cast<std::int64_t>(std::floor(mu));
  if (lo > fl - kSupportRadius || hi < fl + kSupportRadius)
    throw std::invalid_argument("target_pmf: support must cover floor(mu) +- 30");
  Pmf out;
  out.lo = lo;
  out.p.resize(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double d = static_cast<double>(k) - mu;
    out.p[static_cast<std::size_t>(k - lo)] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double total = std::accumulate(out.p.begin(), out.p.end(), 0.0);
  for (double& v : out.p)
    v /= total;
  return out;
}

Pmf target_pmf(double mu, double sigma)
{
  const auto fl = static_cast<std::int64_t>(std::floor(mu));
  return target_pmf(mu, sigma, fl - kSupportRadius, fl + kSupportRadius);
}

Histogram::Histogram(std::int64_t lo, std::int64_t hi)
  : lo_(lo)
  , counts_(static_cast<std::size_t>(hi - lo + 1))
{
  if (hi < lo)
    throw std::invalid_argument("Histogram: empty support");
}

void Histogram::add(std::int64_t v) noexcept
{
  ++total_;
  if (v < lo_ || v >= lo_ + static_cast<std::int64_t>(counts_.size()))
    ++outside_;
  else
    ++counts_[static_cast<std::size_t>(v - lo_)];
}

void Histogram::merge(const Histogram& o)
{
  if (o.lo_ != lo_ || o.counts_.size() != counts_.size())
    throw std::invalid_argument("Histogram: support mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i)
    counts_[i] += o.counts_[i];
  outside_ += o.outside_;
  total_ += o.total_;
}

ChiSquareResult chi_square(std::span<const std::uint64_t> observed, std::span<const double> expected)
{
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square: observed and expected differ in length");
  const std::uint64_t n = std::accumulate(observed.begin(), observed.end(), std::uint64_t{ 0 });
  if (n < kMinChiSquareSamples)
    throw std::invalid_argument("chi_square: fewer than 10^4 samples");
  const double nd = static_cast<double>(n);

  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += static_cast<double>(observed[i]);
    e_acc += expected[i] * nd;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (!obs.empty()) {
    obs.back() += o_acc;
    exp.back() += e_acc;
  }
  if (obs.size() < 2)
    throw std::invalid_argument("chi_square: fewer than two bins after merging");

  ChiSquareResult r;
  r.bins = static_cast<int>(obs.size());
  r.dof = r.bins - 1;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  const boost::math::chi_squared dist(r.dof);
  r.p_value = r.statistic <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double renyi_divergence2(std::span<const double> empirical, std::span<const double> target)
{
  double s = 0.0;
  for (std::size_t i = 0; i < empirical.size() && i < target.size(); ++i)
    if (target[i] > 0.0)
      s += empirical[i] * empirical[i] / target[i];
  return s > 0.0 ? std::log(s) : 0.0;
}

DistReport dist_report(const std::string& label, const Histogram& h, const Pmf& target, double alpha)
{
  if (h.lo() != target.lo || h.counts().size() != target.p.size())
    throw std::invalid_argument("dist_report: histogram and target supports differ");
  DistReport r;
  r.label = label;
  r.support_lo = h.lo();
  r.target = target.p;
  r.samples = h.total();
  r.outside = h.outside();
  r.alpha = alpha;
  r.empirical.resize(h.counts().size());
  const double n = static_cast<double>(std::max<std::uint64_t>(h.total(), 1));
  for (std::size_t i = 0; i < h.counts().size(); ++i)
    r.empirical[i] = static_cast<double>(h.counts()[i]) / n;
  r.chi = chi_square(h.counts(), target.p);
  r.renyi2 = renyi_divergence2(r.empirical, r.target);
  r.passed = r.outside == 0 && r.chi.p_value > alpha;
  return r;
}

void FailureHistogram::add(int rejections) noexcept
{
  const auto bin = static_cast<std::size_t>(std::clamp(rejections, 0, static_cast<int>(kBins) - 1));
  ++counts[bin];
  ++total;
}

double FailureHistogram::ratio(std::size_t bin) const noexcept
{
  return total == 0 || bin >= kBins ? 0.0 : static_cast<double>(counts[bin]) / static_cast<double>(total);
}

FailureHistogram failure_histogram(std::span<const FsmTrace> traces)
{
  FailureHistogram h;
  for (const auto& t : traces) {
    h.add(t.retries_l);
    h.add(t.retries_r);
  }
  return h;
}

void AssistCounter::add(const FsmTrace& t) noexcept
{
  rounds += static_cast<std::uint64_t>(t.aloop_rounds);
  success += static_cast<std::uint64_t>(t.aloop_success);
}

double assisted_success_rate(const AssistCounter& c)
{
  if (c.rounds < kMinAloopRounds)
    throw std::invalid_argument("assisted_success_rate: fewer than 10^4 ALOOP rounds");
  return static_cast<double>(c.success) / static_cast<double>(c.rounds);
}

double assisted_success_rate(std::span<const FsmTrace> traces)
{
  AssistCounter c;
  for (const auto& t : traces)
    c.add(t);
  return assisted_success_rate(c);
}

std::vector<std::uint64_t> sample_multinomial(std::span<const double> p, std::uint64_t n, std::mt19937_64& gen)
{
  std::vector<std::uint64_t> out(p.size());
  double rest = 1.0;
  std::uint64_t left = n;
  for (std::size_t i = 0; i < p.size() && left > 0; ++i) {
    if (i + 1 == p.size() || rest <= 0.0) {
      out[i] = left;
      break;
    }
    const double q = std::clamp(p[i] / rest, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> d(left, q);
    out[i] = d(gen);
    left -= out[i];
    rest -= p[i];
  }
  return out;
}

std::string to_json(const DistReport& r)
{
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["mu"] = r.mu;
  j["sigma"] = r.sigma;
  j["support_lo"] = r.support_lo;
  j["samples"] = r.samples;
  j["outside_support"] = r.outside;
  j["chi_square"] = r.chi.statistic;
  j["dof"] = r.chi.dof;
  j["p_value"] = r.chi.p_value;
  j["alpha"] = r.alpha;
  j["renyi2"] = r.renyi2;
  j["passed"] = r.passed;
  j["empirical"] = r.empirical;
  j["target"] = r.target;
  return j.dump();
}

std::string to_json(const FailureHistogram& h)
{
  nlohmann::ordered_json j;
  j["total"] = h.total;
  j["counts"] = h.counts;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < FailureHistogram::kBins; ++i)
    ratios.push_back(h.ratio(i));
  j["ratios"] = ratios;
  return j.dump();
}

std::string failure_table_text(const FailureHistogram& h)
{
  std::ostringstream out;
  char buf[64];
  out << "Failures   ";
  for (std::size_t i = 0; i < FailureHistogram::kBins; ++i) {
    std::snprintf(buf, sizeof buf, "%9s", i + 1 == FailureHistogram::kBins ? ">=6" : std::to_string(i).c_str());
    out << buf;
  }
  out << "\nCount      ";
  for (auto c : h.counts) {
    std::snprintf(buf, sizeof buf, "%9llu", static_cast<unsigned long long>(c));
    out << buf;
  }
  out << "\nRatio (%)  ";
  for (std::size_t i = 0; i < FailureHistogram::kBins; ++i) {
    std::snprintf(buf, sizeof buf, "%9.2f", 100.0 * h.ratio(i));
    out << buf;
  }
  out << '\n';
  return out.str();
}

std::string dist_table_text(const std::vector<DistReport>& reports)
{
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %10s %12s %5s %10s %6s\n", "cell", "samples", "chi2", "dof", "p", "pass");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-28s %10llu %12.3f %5d %10.4f %6s\n", r.label.c_str(),
                  static_cast<unsigned long long>(r.samples), r.chi.statistic, r.chi.dof, r.chi.p_value,
                  r.passed ? "yes" : "no");
    out << buf;
  }
  return out.str();
}

} // namespace bisampler
