#include "cli.hpp"

#include "bisampler/campaign.hpp"
#include "bisampler/fsm.hpp"
#include "bisampler/kernel.hpp"
#include "bisampler/perf.hpp"
#include "bisampler/simd.hpp"
#include "bisampler/stats.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef BISAMPLER_VERSION
#define BISAMPLER_VERSION "0.0.0"
#endif

namespace bisampler::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kToolName = "bisampler";
constexpr std::uint64_t kQuickSamples = 10000;
constexpr std::uint64_t kLowTrialWarning = 100000;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Config
{
  std::string params = "falcon1024";
  std::optional<double> sigma_min;
  std::optional<double> sigma_max;
  std::string seed = std::string(64, '0');
  std::optional<std::uint64_t> trials;
  std::string policy = "with_assist";
  std::string out = ".";
  std::string format = "csv";
  std::string mu_dist = "uniform:-64,64";
  std::optional<double> sigma;
  double p = 0.5758;
  std::string model = "geometric";
  std::uint64_t tasks = 1000;
  std::string engine = "fixed";
  std::string fault = "none";
  bool quick = false;
  bool emit_gnuplot = false;
};

// Flags as given on the command line; unset entries fall back to the config
// file, then to the defaults.
struct Flags
{
  std::optional<std::string> config_file;
  std::optional<std::string> params, seed, policy, out, format, mu_dist, model, engine, fault;
  std::optional<double> sigma_min, sigma_max, sigma, p;
  std::optional<std::uint64_t> trials, tasks;
  bool quick = false;
  bool emit_gnuplot = false;
};

template <typename T>
void take(const json& j, const char* key, T& dst)
{
  if (j.contains(key))
    dst = j.at(key).get<T>();
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& dst)
{
  if (j.contains(key))
    dst = j.at(key).get<T>();
}

template <typename T>
void apply(const std::optional<T>& flag, T& dst)
{
  if (flag)
    dst = *flag;
}

template <typename T>
void apply(const std::optional<T>& flag, std::optional<T>& dst)
{
  if (flag)
    dst = *flag;
}

Config resolve(const Flags& f)
{
  Config c;
  if (f.config_file) {
    std::ifstream in(*f.config_file);
    if (!in)
      throw UsageError("cannot open config file: " + *f.config_file);
    json j;
    try {
      j = json::parse(in);
      take(j, "params", c.params);
      take(j, "sigma_min", c.sigma_min);
      take(j, "sigma_max", c.sigma_max);
      take(j, "seed", c.seed);
      take(j, "trials", c.trials);
      take(j, "policy", c.policy);
      take(j, "out", c.out);
      take(j, "format", c.format);
      take(j, "mu_dist", c.mu_dist);
      take(j, "sigma", c.sigma);
      take(j, "p", c.p);
      take(j, "model", c.model);
      take(j, "tasks", c.tasks);
      take(j, "engine", c.engine);
      take(j, "fault", c.fault);
    } catch (const json::exception& e) {
      throw UsageError(std::string("invalid config file: ") + e.what());
    }
  }
  apply(f.params, c.params);
  apply(f.sigma_min, c.sigma_min);
  apply(f.sigma_max, c.sigma_max);
  apply(f.seed, c.seed);
  apply(f.trials, c.trials);
  apply(f.policy, c.policy);
  apply(f.out, c.out);
  apply(f.format, c.format);
  apply(f.mu_dist, c.mu_dist);
  apply(f.sigma, c.sigma);
  apply(f.p, c.p);
  apply(f.model, c.model);
  apply(f.tasks, c.tasks);
  apply(f.engine, c.engine);
  apply(f.fault, c.fault);
  c.quick = f.quick;
  c.emit_gnuplot = f.emit_gnuplot;

  if (c.format != "csv" && c.format != "json")
    throw UsageError("--format must be csv or json");
  return c;
}

// Fields that change results; the output location and format do not.
std::string config_hash(const Config& c, const std::string& command)
{
  json j;
  j["command"] = command;
  j["params"] = c.params;
  j["sigma_min"] = c.sigma_min ? json(*c.sigma_min) : json(nullptr);
  j["sigma_max"] = c.sigma_max ? json(*c.sigma_max) : json(nullptr);
  j["seed"] = c.seed;
  j["trials"] = c.trials ? json(*c.trials) : json(nullptr);
  j["policy"] = c.policy;
  j["mu_dist"] = c.mu_dist;
  j["sigma"] = c.sigma ? json(*c.sigma) : json(nullptr);
  j["p"] = c.p;
  j["model"] = c.model;
  j["tasks"] = c.tasks;
  j["engine"] = c.engine;
  j["fault"] = c.fault;
  j["quick"] = c.quick;
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Meta
{
  std::string tool = kToolName;
  std::string version = BISAMPLER_VERSION;
  std::string seed;
  std::string config_hash;
  std::string command;
  std::string params;
};

json meta_json(const Meta& m)
{
  json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["params"] = m.params;
  return j;
}

std::string meta_comment(const Meta& m)
{
  return "# tool=" + m.tool + " version=" + m.version + " command=" + m.command + " seed=" + m.seed +
         " config_hash=" + m.config_hash + " params=" + m.params + "\n";
}

std::string num(double v)
{
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// Rows of scalar cells rendered as CSV (with a metadata comment) or JSON.
struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  std::string csv(const Meta& m) const
  {
    std::ostringstream out;
    out << meta_comment(m);
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        out << (i ? "," : "");
        const json& v = r[i];
        if (v.is_string())
          out << v.get<std::string>();
        else if (v.is_number_float())
          out << num(v.get<double>());
        else
          out << v.dump();
      }
      out << '\n';
    }
    return out.str();
  }

  json to_json() const
  {
    json arr = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t i = 0; i < columns.size(); ++i)
        o[columns[i]] = r[i];
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

void write_file(const fs::path& path, const std::string& text)
{
  std::error_code ec;
  if (path.has_parent_path())
    fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot write " + path.string());
  f << text;
  if (!f)
    throw IoError("write failed: " + path.string());
}

void emit_table(const Config& c, const Meta& m, const std::string& stem, const Table& t, json extra = json::object())
{
  const fs::path base = fs::path(c.out) / stem;
  if (c.format == "csv")
    write_file(base.string() + ".csv", t.csv(m));
  else {
    json j;
    j["meta"] = meta_json(m);
    for (auto& [k, v] : extra.items())
      j[k] = v;
    j["rows"] = t.to_json();
    write_file(base.string() + ".json", j.dump(2) + "\n");
  }
}

ParamSet param_set(const Config& c)
{
  try {
    return make_param_set(c.params, c.sigma_min, c.sigma_max);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Seed256 seed_of(const Config& c)
{
  try {
    return parse_seed(c.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--seed: ") + e.what());
  }
}

Policy policy_of(const Config& c)
{
  const auto p = parse_policy(c.policy);
  if (!p)
    throw UsageError("--policy must be with_assist or without_assist");
  return *p;
}

Meta make_meta(const Config& c, const std::string& command)
{
  Meta m;
  m.seed = c.seed;
  m.config_hash = config_hash(c, command);
  m.command = command;
  m.params = c.params;
  return m;
}

// sample

int cmd_sample(const Config& c, std::ostream& out)
{
  const ParamSet ps = param_set(c);
  const Seed256 seed = seed_of(c);
  const Policy policy = policy_of(c);
  MuDist mu;
  try {
    mu = parse_mu_dist(c.mu_dist);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--mu-dist: ") + e.what());
  }
  if (c.sigma && !(*c.sigma >= ps.sigma_min && *c.sigma <= ps.sigma_max))
    throw UsageError("--sigma must lie in [sigma_min, sigma_max]");
  if (c.engine != "fixed" && c.engine != "oracle")
    throw UsageError("--engine must be fixed or oracle");
  if (c.engine == "oracle" && policy != Policy::without_assist)
    throw UsageError("--engine oracle replays the sequential reference and requires --policy without_assist");

  const KernelConfig cfg = KernelConfig::make(ps);
  TaskSource tasks(seed, mu, ps, c.sigma);
  LaneRandom random(seed);
  const Meta meta = make_meta(c, "sample");

  Table t;
  t.columns = { "task_id", "mu_l", "mu_r", "sigma", "z_l", "z_r", "total_cycles", "retries_l", "retries_r", "switches" };
  std::ostringstream traces;

  if (c.engine == "fixed") {
    KernelDatapath dp(cfg, random);
    BiSampler fsm(dp, policy);
    for (std::uint64_t i = 0; i < c.tasks; ++i) {
      const SampleTask task = tasks.next();
      const TaskResult r = fsm.run_task(task, i + 1 < c.tasks);
      t.rows.push_back({ i, task.mu_l, task.mu_r, task.sigma_prime, r.z_l, r.z_r, r.trace.total_cycles,
                         r.trace.retries_l, r.trace.retries_r, r.trace.switches });
      traces << trace_to_json(r.trace, c.seed) << '\n';
    }
  } else {
    LaneSource left(random, Lane::left), right(random, Lane::right);
    for (std::uint64_t i = 0; i < c.tasks; ++i) {
      const SampleTask task = tasks.next();
      const SamplerZResult zl = samplerz_oracle(task.mu_l, task.sigma_prime, left, cfg);
      const SamplerZResult zr = samplerz_oracle(task.mu_r, task.sigma_prime, right, cfg);
      t.rows.push_back({ i, task.mu_l, task.mu_r, task.sigma_prime, static_cast<double>(zl.value),
                         static_cast<double>(zr.value), 0, zl.attempts - 1, zr.attempts - 1, 0 });
    }
  }

  emit_table(c, meta, "samples", t);
  if (c.engine == "fixed")
    write_file(fs::path(c.out) / "traces.jsonl", traces.str());
  out << "wrote " << c.tasks << " sample pairs to " << (fs::path(c.out) / ("samples." + c.format)).string() << '\n';
  return kExitOk;
}

// latency

RejectionModel rejection_model(const Config& c)
{
  RejectionModel m;
  m.p_accept = c.p;
  if (c.model == "geometric")
    m.mode = RejectionModel::Mode::geometric;
  else if (c.model == "empirical")
    m.mode = RejectionModel::Mode::empirical;
  else
    throw UsageError("--model must be geometric or empirical");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return m;
}

std::uint64_t derived_seed(const Seed256& seed, std::uint32_t stream)
{
  return seeded_engine(seed, stream)();
}

int cmd_latency(const Config& c, std::ostream& out, std::ostream& err)
{
  const Seed256 seed = seed_of(c);
  const RejectionModel model = rejection_model(c);
  const std::uint64_t trials = c.trials.value_or(1000000);
  if (trials == 0)
    throw UsageError("--trials must be positive");
  if (trials < kLowTrialWarning)
    err << "warning: " << trials << " trials give a wide confidence interval; 10^5 or more are recommended\n";

  std::map<std::uint64_t, std::array<std::uint64_t, 2>> hist;
  auto sink_for = [&](std::size_t col) -> TraceSink {
    if (!c.emit_gnuplot)
      return {};
    return [&hist, col](const FsmTrace& t) { ++hist[t.total_cycles][col]; };
  };
  std::vector<LatencyReport> rows;
  rows.push_back(expected_cycles_bi(Policy::with_assist, model, trials, derived_seed(seed, 10), sink_for(0)));
  rows.push_back(expected_cycles_bi(Policy::without_assist, model, trials, derived_seed(seed, 11), sink_for(1)));
  rows.push_back(expected_cycles_falconsign(model, trials, derived_seed(seed, 12)));

  const Meta meta = make_meta(c, "latency");
  const double ref = rows[0].expected_cycles;
  Table t;
  t.columns = { "design", "expected_cycles", "cycles_wo_rejection", "normalized_latency", "trials", "half_width_95",
                "calibration" };
  for (const auto& r : rows)
    t.rows.push_back({ r.design, r.expected_cycles, r.rejection_free_cycles, r.expected_cycles / ref, r.trials,
                       r.half_width, r.calibration });
  json extra;
  extra["model"] = { { "mode", mode_name(model.mode) }, { "p_accept", model.p_accept } };
  emit_table(c, meta, "latency", t, extra);

  if (c.emit_gnuplot) {
    std::ostringstream g;
    g << "# total_cycles with_assist without_assist\n";
    for (const auto& [cycles, n] : hist)
      g << cycles << ' ' << n[0] << ' ' << n[1] << '\n';
    write_file(fs::path(c.out) / "latency_hist.dat", g.str());
  }

  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %10.3f +- %6.3f  (w/o rejection %g)\n", r.design.c_str(), r.expected_cycles,
                  r.half_width, r.rejection_free_cycles);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "assistance saves %.3f cycles (%.2f%%)\n", rows[1].expected_cycles - ref,
                100.0 * (rows[1].expected_cycles - ref) / rows[1].expected_cycles);
  out << buf;
  return kExitOk;
}

// verify

struct Check
{
  std::string name;
  double value = 0.0;
  std::string expectation;
  bool passed = false;
};

int cmd_verify(const Config& c, std::ostream& out, std::ostream& err)
{
  const ParamSet ps = param_set(c);
  const Seed256 seed = seed_of(c);
  if (c.fault != "none" && c.fault != "skew-rcdt")
    throw UsageError("--fault must be none or skew-rcdt");
  const std::uint64_t n = c.quick ? kQuickSamples : c.trials.value_or(1000000);
  if (n < kMinChiSquareSamples)
    throw UsageError("verify needs at least 10^4 samples per check");

  KernelConfig cfg = KernelConfig::make(ps);
  const Rcdt reference = cfg.rcdt;
  if (c.fault == "skew-rcdt") {
    cfg.rcdt.entries[1] += cfg.rcdt.entries[1] / 50;
    cfg.rcdt.validate();
  }

  std::vector<Check> checks;
  std::vector<DistReport> dists;

  // BaseSampler against the reference table
  {
    LaneRandom random(seed);
    Histogram h(0, static_cast<std::int64_t>(Rcdt::kSize));
    for (std::uint64_t i = 0; i < n; ++i)
      h.add(z0_scan(random.uniform_bits72(Lane::left), cfg.rcdt));
    const auto pmf = rcdt_pmf(reference);
    DistReport r = dist_report("z0", h, Pmf{ 0, std::vector<double>(pmf.begin(), pmf.end()) });
    checks.push_back({ "z0_chi_square", r.chi.p_value, "p > 0.01", r.passed });
    dists.push_back(std::move(r));
  }

  // full pipeline over the (mu, sigma') grid
  const std::array<double, 3> mus = { 0.0, 0.5, -7.3 };
  const std::array<double, 3> sigmas = { ps.sigma_min, 1.5, ps.sigma_max };
  AssistCounter assist;
  std::uint64_t attempts = 0, accepts = 0;
  std::uint32_t stream = 100;
  for (double mu : mus) {
    for (double sg : sigmas) {
      if (!(sg >= ps.sigma_min && sg <= ps.sigma_max))
        continue;
      LaneRandom random(derive_seed(seed, stream++));
      KernelDatapath dp(cfg, random);
      BiSampler fsm(dp, Policy::with_assist);
      const Pmf target = target_pmf(mu, sg);
      Histogram h(target.lo, target.hi());
      const std::uint64_t tasks = (n + 1) / 2;
      for (std::uint64_t i = 0; i < tasks; ++i) {
        const TaskResult r = fsm.run_task({ mu, mu, sg }, i + 1 < tasks);
        h.add(static_cast<std::int64_t>(r.z_l));
        h.add(static_cast<std::int64_t>(r.z_r));
        assist.add(r.trace);
      }
      attempts += dp.attempts();
      accepts += dp.accepts();
      char label[64];
      std::snprintf(label, sizeof label, "mu=%g sigma=%.6g", mu, sg);
      DistReport r = dist_report(label, h, target);
      r.mu = mu;
      r.sigma = sg;
      checks.push_back({ std::string("dist ") + label, r.chi.p_value, "p > 0.01", r.passed });
      dists.push_back(std::move(r));
    }
  }

  // single-path acceptance and the assisted retry rate
  const double p_meas = static_cast<double>(accepts) / static_cast<double>(attempts);
  checks.push_back({ "acceptance_rate", p_meas, "in [0.52, 0.62]", p_meas >= 0.52 && p_meas <= 0.62 });
  double rate = 0.0;
  bool rate_ok = false;
  try {
    rate = assisted_success_rate(assist);
    const double predicted = 1.0 - (1.0 - p_meas) * (1.0 - p_meas);
    rate_ok = std::abs(rate - predicted) <= 0.01;
  } catch (const std::invalid_argument& e) {
    err << "assist rate: " << e.what() << '\n';
  }
  checks.push_back({ "assisted_success_rate", rate, "1-(1-p)^2 +- 0.01", rate_ok });

  // failure histogram of single-path executions, without assistance
  FailureHistogram fh;
  {
    LaneRandom random(derive_seed(seed, 200));
    KernelDatapath dp(cfg, random);
    BiSampler fsm(dp, Policy::without_assist);
    TaskSource tasks(seed, MuDist{}, ps, std::nullopt);
    const std::uint64_t execs = c.quick ? kQuickSamples : 102400;
    for (std::uint64_t i = 0; i < execs / 2; ++i) {
      const TaskResult r = fsm.run_task(tasks.next(), i + 1 < execs / 2);
      fh.add(r.trace.retries_l);
      fh.add(r.trace.retries_r);
    }
  }
  checks.push_back({ "failure_ratio_0", fh.ratio(0), "0.5758 +- 0.01", std::abs(fh.ratio(0) - kReferenceFailureRatios[0]) <= 0.01 });
  checks.push_back(
    { "failure_ratio_1", fh.ratio(1), "0.2439 +- 0.015", std::abs(fh.ratio(1) - kReferenceFailureRatios[1]) <= 0.015 });

  // reports
  const Meta meta = make_meta(c, "verify");
  Table t;
  t.columns = { "check", "value", "expectation", "passed" };
  for (const auto& ch : checks)
    t.rows.push_back({ ch.name, ch.value, ch.expectation, ch.passed });
  json extra;
  extra["mode"] = c.quick ? "quick" : "full";
  extra["distributions"] = json::array();
  for (const auto& d : dists)
    extra["distributions"].push_back(json::parse(to_json(d)));
  extra["failure_histogram"] = json::parse(to_json(fh));
  emit_table(c, meta, "verify", t, extra);

  if (c.emit_gnuplot) {
    for (std::size_t i = 0; i < dists.size(); ++i) {
      std::ostringstream g;
      g << "# " << dists[i].label << "\n# k empirical target\n";
      for (std::size_t k = 0; k < dists[i].target.size(); ++k)
        g << dists[i].support_lo + static_cast<std::int64_t>(k) << ' ' << num(dists[i].empirical[k]) << ' '
          << num(dists[i].target[k]) << '\n';
      write_file(fs::path(c.out) / ("pmf_" + std::to_string(i) + ".dat"), g.str());
    }
  }

  out << dist_table_text(dists) << '\n' << failure_table_text(fh) << '\n';
  std::vector<std::string> failed;
  for (const auto& ch : checks) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-32s %12.6f  %-20s %s\n", ch.name.c_str(), ch.value, ch.expectation.c_str(),
                  ch.passed ? "ok" : "FAILED");
    out << buf;
    if (!ch.passed)
      failed.push_back(ch.name);
  }
  if (c.quick) {
    out << "quick mode: checks are informational\n";
    return kExitOk;
  }
  if (!failed.empty()) {
    err << "failed checks:";
    for (const auto& f : failed)
      err << ' ' << f;
    err << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

// vectors

int cmd_vectors(const Config& c, const std::string& action, const std::optional<std::string>& file,
                std::uint64_t count, std::ostream& out, std::ostream& err)
{
  const ParamSet ps = param_set(c);
  const KernelConfig cfg = KernelConfig::make(ps);
  const fs::path path = file ? fs::path(*file) : fs::path(c.out) / "vectors.txt";
  if (action == "emit") {
    const Seed256 seed = seed_of(c);
    const Meta meta = make_meta(c, "vectors");
    std::ostringstream s;
    s << meta_comment(meta) << "# seed mu_l mu_r sigma z_l z_r bytes_l bytes_r\n";
    for (const auto& v : generate_vectors(seed, count, cfg))
      s << format_vector(v) << '\n';
    write_file(path, s.str());
    out << "wrote " << count << " vectors to " << path.string() << '\n';
    return kExitOk;
  }
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  VectorCheck res;
  try {
    res = check_vectors(in, cfg);
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  out << res.total - res.mismatches << "/" << res.total << " vectors match\n";
  for (const auto& d : res.details)
    err << d << '\n';
  return res.mismatches == 0 && res.total > 0 ? kExitOk : kExitCheckFailed;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Dual-path discrete Gaussian sampler model", kToolName };
  app.set_version_flag("--version", std::string(kToolName) + " " + BISAMPLER_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_file, "JSON config file; flags take precedence");
  app.add_option("--seed", f.seed, "64 hex characters");
  app.add_option("--params", f.params, "falcon512 | falcon1024 | custom");
  app.add_option("--sigma-min", f.sigma_min, "sigma_min override");
  app.add_option("--sigma-max", f.sigma_max, "sigma_max override");
  app.add_option("--trials", f.trials, "trial or sample count");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--format", f.format, "csv | json");

  auto* sample = app.add_subcommand("sample", "draw sample pairs through the dual-path machine");
  sample->add_option("--tasks", f.tasks, "number of tasks (pairs)");
  sample->add_option("--mu-dist", f.mu_dist, "fixed:a,b | uniform:lo,hi");
  sample->add_option("--sigma", f.sigma, "fixed sigma'; default uniform in [sigma_min, sigma_max]");
  sample->add_option("--policy", f.policy, "with_assist | without_assist");
  sample->add_option("--engine", f.engine, "fixed | oracle");

  auto* latency = app.add_subcommand("latency", "expected cycle counts of the compared designs");
  latency->add_option("--p", f.p, "single-path acceptance probability");
  latency->add_option("--model", f.model, "geometric | empirical");
  latency->add_flag("--emit-gnuplot", f.emit_gnuplot, "write latency_hist.dat");

  auto* verify = app.add_subcommand("verify", "statistical acceptance suite");
  verify->add_flag("--quick", f.quick, "10^4 samples per check, informational");
  verify->add_option("--fault", f.fault, "none | skew-rcdt");
  verify->add_flag("--emit-gnuplot", f.emit_gnuplot, "write pmf_<i>.dat overlays");

  auto* vectors = app.add_subcommand("vectors", "emit or check golden vectors");
  std::string action;
  std::optional<std::string> file;
  std::uint64_t count = 16;
  vectors->add_option("action", action, "emit | check")->required()->check(CLI::IsMember({ "emit", "check" }));
  vectors->add_option("--file", file, "vector file (default <out>/vectors.txt)");
  vectors->add_option("--count", count, "vectors to emit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const Config c = resolve(f);
    if (*sample)
      return cmd_sample(c, out);
    if (*latency)
      return cmd_latency(c, out, err);
    if (*verify)
      return cmd_verify(c, out, err);
    return cmd_vectors(c, action, file, count, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

} // namespace bisampler::cli
