#include "bisampler/campaign.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace bisampler {

namespace {

double parse_double(std::string_view s)
{
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw std::invalid_argument("not a number: " + std::string(s));
  return v;
}

std::uint64_t parse_u64(std::string_view s)
{
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw std::invalid_argument("not an unsigned integer: " + std::string(s));
  return v;
}

std::string shortest(double v)
{
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

} // namespace

std::string MuDist::to_string() const
{
  return std::string(kind == Kind::fixed ? "fixed:" : "uniform:") + shortest(a) + "," + shortest(b);
}

MuDist parse_mu_dist(std::string_view text)
{
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("mu-dist must be fixed:a,b or uniform:lo,hi");
  const auto kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  if (args.size() != 2)
    throw std::invalid_argument("mu-dist needs two comma-separated values");
  MuDist d;
  d.a = parse_double(args[0]);
  d.b = parse_double(args[1]);
  if (!std::isfinite(d.a) || !std::isfinite(d.b))
    throw std::invalid_argument("mu-dist values must be finite");
  if (kind == "fixed")
    d.kind = MuDist::Kind::fixed;
  else if (kind == "uniform") {
    d.kind = MuDist::Kind::uniform;
    if (!(d.a < d.b))
      throw std::invalid_argument("mu-dist uniform needs lo < hi");
  } else
    throw std::invalid_argument("unknown mu-dist kind: " + std::string(kind));
  return d;
}

std::mt19937_64 seeded_engine(const Seed256& seed, std::uint32_t stream)
{
  std::vector<std::uint32_t> words;
  for (std::size_t i = 0; i < 32; i += 4)
    words.push_back(std::uint32_t(seed[i]) | (std::uint32_t(seed[i + 1]) << 8) | (std::uint32_t(seed[i + 2]) << 16) |
                    (std::uint32_t(seed[i + 3]) << 24));
  words.push_back(stream);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

Seed256 derive_seed(const Seed256& seed, std::uint32_t stream)
{
  auto gen = seeded_engine(seed, stream);
  Seed256 s{};
  for (std::size_t w = 0; w < 4; ++w) {
    const std::uint64_t x = gen();
    for (std::size_t b = 0; b < 8; ++b)
      s[8 * w + b] = static_cast<std::uint8_t>(x >> (8 * b));
  }
  return s;
}

TaskSource::TaskSource(const Seed256& seed, MuDist mu, const ParamSet& params, std::optional<double> sigma)
  : gen_(seeded_engine(seed, 1))
  , mu_(mu)
  , params_(params)
  , sigma_(sigma)
{
}

SampleTask TaskSource::next()
{
  SampleTask t;
  if (mu_.kind == MuDist::Kind::fixed) {
    t.mu_l = mu_.a;
    t.mu_r = mu_.b;
  } else {
    std::uniform_real_distribution<double> d(mu_.a, mu_.b);
    t.mu_l = d(gen_);
    t.mu_r = d(gen_);
  }
  if (sigma_)
    t.sigma_prime = *sigma_;
  else {
    std::uniform_real_distribution<double> d(params_.sigma_min, params_.sigma_max);
    t.sigma_prime = d(gen_);
  }
  return t;
}

GoldenVector compute_vector(const Seed256& seed, const SampleTask& task, const KernelConfig& cfg)
{
  LaneRandom random(seed);
  KernelDatapath dp(cfg, random);
  BiSampler fsm(dp, Policy::with_assist);
  const TaskResult r = fsm.run_task(task);
  GoldenVector v;
  v.seed = seed;
  v.mu_l = task.mu_l;
  v.mu_r = task.mu_r;
  v.sigma = task.sigma_prime;
  v.z_l = r.z_l;
  v.z_r = r.z_r;
  v.bytes_l = random.bytes_consumed(Lane::left);
  v.bytes_r = random.bytes_consumed(Lane::right);
  return v;
}

std::string format_vector(const GoldenVector& v)
{
  std::ostringstream out;
  out << seed_to_hex(v.seed) << ' ' << shortest(v.mu_l) << ' ' << shortest(v.mu_r) << ' ' << shortest(v.sigma) << ' '
      << shortest(v.z_l) << ' ' << shortest(v.z_r) << ' ' << v.bytes_l << ' ' << v.bytes_r;
  return out.str();
}

GoldenVector parse_vector(std::string_view line)
{
  std::vector<std::string_view> f;
  for (auto tok : split(line, ' '))
    if (!tok.empty())
      f.push_back(tok);
  if (f.size() != 8)
    throw std::invalid_argument("golden vector: expected 8 fields");
  GoldenVector v;
  v.seed = parse_seed(f[0]);
  v.mu_l = parse_double(f[1]);
  v.mu_r = parse_double(f[2]);
  v.sigma = parse_double(f[3]);
  v.z_l = parse_double(f[4]);
  v.z_r = parse_double(f[5]);
  v.bytes_l = parse_u64(f[6]);
  v.bytes_r = parse_u64(f[7]);
  return v;
}

std::vector<GoldenVector> generate_vectors(const Seed256& base, std::size_t n, const KernelConfig& cfg)
{
  auto gen = seeded_engine(base, 2);
  std::uniform_real_distribution<double> mu(-64.0, 64.0);
  std::uniform_real_distribution<double> sigma(cfg.params.sigma_min, cfg.params.sigma_max);
  std::vector<GoldenVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Seed256 s = derive_seed(base, 1000 + static_cast<std::uint32_t>(i));
    SampleTask t;
    t.mu_l = mu(gen);
    t.mu_r = mu(gen);
    t.sigma_prime = sigma(gen);
    out.push_back(compute_vector(s, t, cfg));
  }
  return out;
}

VectorCheck check_vectors(std::istream& in, const KernelConfig& cfg)
{
  VectorCheck res;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    ++res.total;
    const GoldenVector want = parse_vector(line);
    const GoldenVector got = compute_vector(want.seed, { want.mu_l, want.mu_r, want.sigma }, cfg);
    if (!(got == want)) {
      ++res.mismatches;
      res.details.push_back("line " + std::to_string(lineno) + ": expected " + format_vector(want) + ", got " +
                            format_vector(got));
    }
  }
  return res;
}

} // namespace bisampler
