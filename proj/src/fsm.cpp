#include "bisampler/fsm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace bisampler {

namespace {

constexpr std::array<const char*, 9> kStateNames = { "INIT",  "IDLE",    "PRE",     "NREG", "NLOOP",
                                                     "ALOOP", "SWITCHL", "SWITCHR", "F_ADD" };

constexpr std::array<const char*, kModuleCount> kModuleNames = { "Pre_samp", "Base",  "ChaCha", "Refill_l",
                                                                 "Refill_r", "Bef_l", "Bef_r",  "For_l",
                                                                 "For_r",    "Cmp_l", "Cmp_r",  "Fpr_adder" };

constexpr std::size_t idx(Lane l) noexcept
{
  return static_cast<std::size_t>(l);
}

constexpr Lane other(Lane l) noexcept
{
  return l == Lane::left ? Lane::right : Lane::left;
}

constexpr Module refill_of(std::size_t p) noexcept
{
  return p == 0 ? Module::refill_l : Module::refill_r;
}
constexpr Module bef_of(std::size_t p) noexcept
{
  return p == 0 ? Module::bef_l : Module::bef_r;
}
constexpr Module for_of(std::size_t p) noexcept
{
  return p == 0 ? Module::for_l : Module::for_r;
}
constexpr Module cmp_of(std::size_t p) noexcept
{
  return p == 0 ? Module::cmp_l : Module::cmp_r;
}

} // namespace

const char* state_name(FsmState s) noexcept
{
  return kStateNames[static_cast<std::size_t>(s)];
}

std::optional<FsmState> parse_state(std::string_view name) noexcept
{
  for (std::size_t i = 0; i < kStateNames.size(); ++i)
    if (name == kStateNames[i])
      return static_cast<FsmState>(i);
  return std::nullopt;
}

const char* module_name(Module m) noexcept
{
  return kModuleNames[static_cast<std::size_t>(m)];
}

std::vector<std::string> ModuleSet::names() const
{
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kModuleCount; ++i)
    if (contains(static_cast<Module>(i)))
      out.emplace_back(kModuleNames[i]);
  return out;
}

ModuleSet activation_set(FsmState s) noexcept
{
  using M = Module;
  switch (s) {
    case FsmState::INIT:
      return { M::base, M::chacha, M::refill_l, M::refill_r };
    case FsmState::PRE:
      return { M::pre_samp, M::bef_l, M::bef_r, M::refill_l, M::refill_r };
    case FsmState::NLOOP:
    case FsmState::ALOOP:
      return { M::bef_l, M::bef_r, M::for_l, M::for_r, M::cmp_l,
               M::cmp_r, M::base,  M::refill_l, M::refill_r };
    case FsmState::SWITCHL:
      return { M::bef_r };
    case FsmState::SWITCHR:
      return { M::bef_l };
    case FsmState::F_ADD:
      return { M::fpr_adder };
    case FsmState::IDLE:
    case FsmState::NREG:
      break;
  }
  return {};
}

bool valid_transition(FsmState from, FsmState to) noexcept
{
  using S = FsmState;
  switch (from) {
    case S::INIT:
      return to == S::IDLE;
    case S::IDLE:
      return to == S::PRE;
    case S::PRE:
      return to == S::NREG;
    case S::NREG:
      return to == S::NLOOP;
    case S::NLOOP:
      return to == S::F_ADD || to == S::SWITCHL || to == S::SWITCHR || to == S::NLOOP;
    case S::SWITCHL:
    case S::SWITCHR:
      return to == S::ALOOP;
    case S::ALOOP:
      return to == S::F_ADD || to == S::ALOOP;
    case S::F_ADD:
      return to == S::IDLE || to == S::PRE;
  }
  return false;
}

int CycleCosts::loop_cost(bool first_round, int extra_bytes) const noexcept
{
  if (!first_round)
    return loop_max;
  return std::min(loop_base + std::max(extra_bytes, 0), loop_max);
}

const char* policy_name(Policy p) noexcept
{
  return p == Policy::with_assist ? "with_assist" : "without_assist";
}

std::optional<Policy> parse_policy(std::string_view name) noexcept
{
  if (name == "with_assist")
    return Policy::with_assist;
  if (name == "without_assist")
    return Policy::without_assist;
  return std::nullopt;
}

FsmState aloop_round(Lane, bool acc_l, bool acc_r) noexcept
{
  return acc_l || acc_r ? FsmState::F_ADD : FsmState::ALOOP;
}

Lane aloop_winner(bool acc_l, bool) noexcept
{
  return acc_l ? Lane::left : Lane::right;
}

// KernelDatapath

Fxp81 KernelDatapath::target_r(std::size_t path) const
{
  return target_[path] == 0 ? pre_.r_l : pre_.r_r;
}

void KernelDatapath::fill(bool need_l, bool need_r, ModuleSet& used)
{
  if (!need_l && !need_r)
    return;
  used.add(Module::base);
  // u for every empty slot first (one 144-bit draw when both are empty),
  // then each path's b byte from its own lane.
  std::array<uint128, 2> u{};
  if (need_l && need_r) {
    const auto w = random_->uniform_u144();
    u = { w.lo, w.hi };
  } else if (need_l)
    u[0] = random_->uniform_bits72(Lane::left);
  else
    u[1] = random_->uniform_bits72(Lane::right);
  const std::array<bool, 2> need{ need_l, need_r };
  for (std::size_t p = 0; p < 2; ++p) {
    if (!need[p])
      continue;
    Candidate c;
    c.z0 = z0_scan(u[p], cfg_->rcdt);
    c.b = random_->uniform_bits8(static_cast<Lane>(p)) & 1;
    cand_[p] = c;
    used.add(refill_of(p));
  }
}

void KernelDatapath::bef(std::size_t path, ModuleSet& used)
{
  const Candidate& c = *cand_[path];
  st_[path] = bef_loop(c.z0, c.b, target_r(path), pre_.inv_2sigma2, cfg_->lut);
  used.add(bef_of(path));
}

ModuleSet KernelDatapath::init()
{
  ModuleSet used{ Module::chacha };
  fill(!cand_[0], !cand_[1], used);
  return used;
}

ModuleSet KernelDatapath::prepare(const SampleTask& task)
{
  ModuleSet used{ Module::pre_samp };
  pre_ = pre_samp(task, cfg_->params);
  target_ = { 0, 1 };
  const auto g0 = random_->bytes_generated(Lane::left);
  const auto g1 = random_->bytes_generated(Lane::right);
  random_->top_up();
  if (random_->bytes_generated(Lane::left) != g0)
    used.add(Module::refill_l);
  if (random_->bytes_generated(Lane::right) != g1)
    used.add(Module::refill_r);
  for (std::size_t p = 0; p < 2; ++p)
    bef(p, used);
  return used;
}

RoundOutcome KernelDatapath::round(bool run_l, bool run_r)
{
  RoundOutcome o;
  const std::array<bool, 2> run{ run_l, run_r };
  for (std::size_t p = 0; p < 2; ++p) {
    if (!run[p])
      continue;
    PathState& st = st_[p];
    st.y = for_loop(st, pre_.ccs);
    LaneSource src(*random_, static_cast<Lane>(p));
    const CmpResult r = cmp(st.y, st.s, src);
    st.accepted = r.accept;
    o.used.add(for_of(p)).add(cmp_of(p)).add(refill_of(p));
    ++attempts_;
    if (r.accept)
      ++accepts_;
    if (p == 0) {
      o.acc_l = r.accept;
      o.iter_l = r.iterations;
      o.z_l = st.z;
    } else {
      o.acc_r = r.accept;
      o.iter_r = r.iterations;
      o.z_r = st.z;
    }
    cand_[p].reset();
  }
  // prefetch the next candidates for the consumed slots
  fill(run_l, run_r, o.used);
  for (std::size_t p = 0; p < 2; ++p)
    if (run[p])
      bef(p, o.used);
  return o;
}

ModuleSet KernelDatapath::retarget(Lane helper)
{
  ModuleSet used;
  const std::size_t h = idx(helper);
  target_[h] = idx(other(helper));
  bef(h, used);
  return used;
}

std::pair<double, double> KernelDatapath::finalize(int z_left_sample, int z_right_sample, ModuleSet& used)
{
  used.add(Module::fpr_adder);
  return { fpr_add(z_left_sample, pre_.floor_mu_l, cfg_->lut), fpr_add(z_right_sample, pre_.floor_mu_r, cfg_->lut) };
}

// DecisionDatapath

ModuleSet DecisionDatapath::init()
{
  return { Module::chacha, Module::base, Module::refill_l, Module::refill_r };
}

ModuleSet DecisionDatapath::prepare(const SampleTask&)
{
  attempt_ = { 0, 0 };
  return { Module::pre_samp, Module::bef_l, Module::bef_r };
}

RoundOutcome DecisionDatapath::round(bool run_l, bool run_r)
{
  begin_round();
  RoundOutcome o;
  const std::array<bool, 2> run{ run_l, run_r };
  for (std::size_t p = 0; p < 2; ++p) {
    if (!run[p])
      continue;
    const auto [acc, iters] = decide(static_cast<Lane>(p), attempt_[p]);
    attempt_[p] = acc ? 0 : attempt_[p] + 1;
    o.used.add(for_of(p)).add(cmp_of(p)).add(refill_of(p)).add(bef_of(p)).add(Module::base);
    if (p == 0) {
      o.acc_l = acc;
      o.iter_l = iters;
    } else {
      o.acc_r = acc;
      o.iter_r = iters;
    }
  }
  return o;
}

ModuleSet DecisionDatapath::retarget(Lane helper)
{
  attempt_[idx(helper)] = 0;
  return { bef_of(idx(helper)) };
}

std::pair<double, double> DecisionDatapath::finalize(int z_left_sample, int z_right_sample, ModuleSet& used)
{
  used.add(Module::fpr_adder);
  return { static_cast<double>(z_left_sample), static_cast<double>(z_right_sample) };
}

SyntheticDatapath::SyntheticDatapath(std::vector<double> hazard, std::uint64_t seed)
  : hazard_(std::move(hazard))
  , gen_(seed)
{
  if (hazard_.empty())
    throw std::invalid_argument("SyntheticDatapath: empty hazard table");
  for (double h : hazard_)
    if (!(h >= 0.0 && h <= 1.0))
      throw std::invalid_argument("SyntheticDatapath: hazard outside [0, 1]");
}

std::pair<bool, int> SyntheticDatapath::decide(Lane, int attempt)
{
  const double h = hazard_[std::min(static_cast<std::size_t>(attempt), hazard_.size() - 1)];
  std::bernoulli_distribution d(h);
  return { d(gen_), 1 };
}

void ScriptedDatapath::begin_round()
{
  if (next_ >= steps_.size())
    throw std::out_of_range("ScriptedDatapath: script exhausted");
  ++next_;
}

std::pair<bool, int> ScriptedDatapath::decide(Lane lane, int)
{
  const Step& s = steps_[next_ - 1];
  return lane == Lane::left ? std::pair{ s.acc_l, s.iter_l } : std::pair{ s.acc_r, s.iter_r };
}

// BiSampler

BiSampler::BiSampler(Datapath& dp, Policy policy, CycleCosts costs)
  : dp_(&dp)
  , policy_(policy)
  , costs_(costs)
{
  log_.push_back({ FsmState::INIT, 0, 0, activation_set(FsmState::INIT), dp_->init() });
  log_.push_back({ FsmState::IDLE, 0, 0, activation_set(FsmState::IDLE), {} });
}

TaskResult BiSampler::run_task(const SampleTask& task, bool more_pending)
{
  TaskResult out;
  FsmTrace& tr = out.trace;
  tr.task_id = next_task_++;
  auto record = [&](FsmState s, int duration, ModuleSet used) {
    tr.records.push_back({ s, clock_, duration, activation_set(s), used });
    clock_ += static_cast<std::uint64_t>(duration);
    tr.total_cycles += static_cast<std::uint64_t>(duration);
  };

  record(FsmState::PRE, costs_.pre, dp_->prepare(task));
  record(FsmState::NREG, costs_.nreg, {});

  bool done_l = false, done_r = false;
  int z_l = 0, z_r = 0;
  int rounds = 0;

  // NLOOP
  while (!(done_l && done_r)) {
    if (rounds >= kMaxRounds)
      throw std::runtime_error("BiSampler: loop round cap reached");
    const bool run_l = !done_l, run_r = !done_r;
    const RoundOutcome o = dp_->round(run_l, run_r);
    const int extra = std::max(run_l ? o.iter_l - 1 : 0, run_r ? o.iter_r - 1 : 0);
    record(FsmState::NLOOP, costs_.loop_cost(rounds == 0, extra), o.used);
    ++rounds;
    if (run_l) {
      if (o.acc_l) {
        done_l = true;
        z_l = o.z_l;
      } else
        ++tr.retries_l;
    }
    if (run_r) {
      if (o.acc_r) {
        done_r = true;
        z_r = o.z_r;
      } else
        ++tr.retries_r;
    }
    if (policy_ == Policy::with_assist && done_l != done_r)
      break;
  }

  if (done_l != done_r) {
    // one sample remains; the accepted path switches over to help
    const Lane remaining = done_l ? Lane::right : Lane::left;
    const Lane helper = other(remaining);
    record(remaining == Lane::left ? FsmState::SWITCHL : FsmState::SWITCHR, costs_.switch_, dp_->retarget(helper));
    ++tr.switches;
    for (;;) {
      if (rounds >= kMaxRounds)
        throw std::runtime_error("BiSampler: loop round cap reached");
      const RoundOutcome o = dp_->round(true, true);
      record(FsmState::ALOOP, costs_.loop_max, o.used);
      ++rounds;
      ++tr.aloop_rounds;
      if (aloop_round(remaining, o.acc_l, o.acc_r) == FsmState::F_ADD) {
        ++tr.aloop_success;
        const int z = aloop_winner(o.acc_l, o.acc_r) == Lane::left ? o.z_l : o.z_r;
        (remaining == Lane::left ? z_l : z_r) = z;
        break;
      }
      ++(remaining == Lane::left ? tr.retries_l : tr.retries_r);
    }
  }

  ModuleSet used;
  const auto [vl, vr] = dp_->finalize(z_l, z_r, used);
  record(FsmState::F_ADD, costs_.f_add, used);
  out.z_l = vl;
  out.z_r = vr;

  tr.next_state = more_pending ? FsmState::PRE : FsmState::IDLE;
  if (!more_pending)
    log_.push_back({ FsmState::IDLE, clock_, 0, activation_set(FsmState::IDLE), {} });
  return out;
}

std::string trace_to_json(const FsmTrace& t, std::string_view seed_hex)
{
  nlohmann::ordered_json j;
  j["task_id"] = t.task_id;
  j["seed"] = std::string(seed_hex);
  auto& states = j["states"] = nlohmann::ordered_json::array();
  for (const auto& r : t.records)
    states.push_back({ { "name", state_name(r.state) }, { "cycles", r.duration } });
  j["total_cycles"] = t.total_cycles;
  j["retries_l"] = t.retries_l;
  j["retries_r"] = t.retries_r;
  j["switches"] = t.switches;
  return j.dump();
}

} // namespace bisampler
