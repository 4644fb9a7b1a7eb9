#pragma once
#include "bisampler/kernel.hpp"
#include "bisampler/random.hpp"

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bisampler {

enum class FsmState : std::uint8_t
{
  INIT,
  IDLE,
  PRE,
  NREG,
  NLOOP,
  ALOOP,
  SWITCHL,
  SWITCHR,
  F_ADD
};

const char* state_name(FsmState s) noexcept;
std::optional<FsmState> parse_state(std::string_view name) noexcept;

// Columns of the state-to-module activation table.
enum class Module : std::uint8_t
{
  pre_samp,
  base,
  chacha,
  refill_l,
  refill_r,
  bef_l,
  bef_r,
  for_l,
  for_r,
  cmp_l,
  cmp_r,
  fpr_adder
};

inline constexpr std::size_t kModuleCount = 12;
const char* module_name(Module m) noexcept;

class ModuleSet
{
public:
  constexpr ModuleSet() = default;
  constexpr ModuleSet(std::initializer_list<Module> ms)
  {
    for (Module m : ms)
      add(m);
  }

  constexpr ModuleSet& add(Module m) noexcept
  {
    bits_ |= bit(m);
    return *this;
  }
  constexpr ModuleSet& merge(ModuleSet o) noexcept
  {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool contains(Module m) const noexcept { return (bits_ & bit(m)) != 0; }
  constexpr bool subset_of(ModuleSet o) const noexcept { return (bits_ & ~o.bits_) == 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint16_t bits() const noexcept { return bits_; }
  std::vector<std::string> names() const;

  friend constexpr bool operator==(ModuleSet, ModuleSet) = default;

private:
  static constexpr std::uint16_t bit(Module m) noexcept
  {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(m));
  }
  std::uint16_t bits_ = 0;
};

// The checkmarked modules of each state's row.
ModuleSet activation_set(FsmState s) noexcept;

bool valid_transition(FsmState from, FsmState to) noexcept;

struct CycleCosts
{
  int pre = 19;
  int nreg = 1;
  int loop_base = 34;
  int loop_max = 41;
  int switch_ = 9;
  int f_add = 5;

  // First loop round: loop_base plus one cycle per extra CMP byte of the
  // slower path. Every later round (NLOOP retry or ALOOP) costs loop_max.
  int loop_cost(bool first_round, int extra_bytes) const noexcept;
  int rejection_free() const noexcept { return pre + nreg + loop_base + f_add; }
};

struct StateRecord
{
  FsmState state = FsmState::IDLE;
  std::uint64_t entry_cycle = 0;
  int duration = 0;
  ModuleSet active; // the state's table row
  ModuleSet used;   // modules the model actually invoked
};

struct FsmTrace
{
  std::uint64_t task_id = 0;
  std::vector<StateRecord> records;
  std::uint64_t total_cycles = 0;
  int retries_l = 0; // rejected attempts of the left sample
  int retries_r = 0;
  int switches = 0;
  int aloop_rounds = 0;
  int aloop_success = 0;
  FsmState next_state = FsmState::IDLE;
};

enum class Policy
{
  with_assist,
  without_assist
};

const char* policy_name(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view name) noexcept;

// ALOOP completion rule: F_ADD when either path accepts, else ALOOP.
FsmState aloop_round(Lane remaining, bool acc_l, bool acc_r) noexcept;
// Path whose result completes an ALOOP round; the left path on a tie.
Lane aloop_winner(bool acc_l, bool acc_r) noexcept;

struct RoundOutcome
{
  bool acc_l = false;
  bool acc_r = false;
  int iter_l = 0;
  int iter_r = 0;
  int z_l = 0; // valid when the path accepted
  int z_r = 0;
  ModuleSet used;
};

// Datapath pair driven by the FSM. Each path holds one prepared candidate;
// a candidate is replaced only after a round consumes it.
class Datapath
{
public:
  virtual ~Datapath() = default;

  // Fill both candidate slots.
  virtual ModuleSet init() = 0;
  // Shared pre-sampling; both paths target their own sample.
  virtual ModuleSet prepare(const SampleTask& task) = 0;
  // Attempt the current candidates on the selected paths, then prefetch.
  virtual RoundOutcome round(bool run_l, bool run_r) = 0;
  // The helper path now targets the other path's sample.
  virtual ModuleSet retarget(Lane helper) = 0;
  // Output values for the left and right samples.
  virtual std::pair<double, double> finalize(int z_left_sample, int z_right_sample, ModuleSet& used) = 0;
};

// Full arithmetic pipeline on the lane-partitioned keystream.
class KernelDatapath final : public Datapath
{
public:
  KernelDatapath(const KernelConfig& cfg, LaneRandom& random)
    : cfg_(&cfg)
    , random_(&random)
  {
  }

  ModuleSet init() override;
  ModuleSet prepare(const SampleTask& task) override;
  RoundOutcome round(bool run_l, bool run_r) override;
  ModuleSet retarget(Lane helper) override;
  std::pair<double, double> finalize(int z_left_sample, int z_right_sample, ModuleSet& used) override;

  // Acceptance counters over all attempts.
  std::uint64_t attempts() const noexcept { return attempts_; }
  std::uint64_t accepts() const noexcept { return accepts_; }

private:
  void fill(bool need_l, bool need_r, ModuleSet& used);
  void bef(std::size_t path, ModuleSet& used);
  Fxp81 target_r(std::size_t path) const;

  const KernelConfig* cfg_;
  LaneRandom* random_;
  PreComputed pre_{};
  std::array<std::optional<Candidate>, 2> cand_{};
  std::array<PathState, 2> st_{};
  std::array<std::size_t, 2> target_{ 0, 1 };
  std::uint64_t attempts_ = 0;
  std::uint64_t accepts_ = 0;
};

// Accept/reject decisions without arithmetic. Subclasses supply decide().
class DecisionDatapath : public Datapath
{
public:
  ModuleSet init() override;
  ModuleSet prepare(const SampleTask& task) override;
  RoundOutcome round(bool run_l, bool run_r) override;
  ModuleSet retarget(Lane helper) override;
  std::pair<double, double> finalize(int z_left_sample, int z_right_sample, ModuleSet& used) override;

protected:
  // Outcome and CMP byte count of path `lane` on its attempt number
  // `attempt` (0-based, counted since the path last accepted or switched).
  virtual std::pair<bool, int> decide(Lane lane, int attempt) = 0;
  // Called once per round before the paths decide.
  virtual void begin_round() {}

private:
  std::array<int, 2> attempt_{};
};

// Bernoulli decisions: hazard[k] is the acceptance probability of attempt k;
// the last entry applies to every later attempt. No CMP ties.
class SyntheticDatapath final : public DecisionDatapath
{
public:
  SyntheticDatapath(std::vector<double> hazard, std::uint64_t seed);

private:
  std::pair<bool, int> decide(Lane lane, int attempt) override;

  std::vector<double> hazard_;
  std::mt19937_64 gen_;
};

// Replays a fixed per-round script; throws std::out_of_range when exhausted.
class ScriptedDatapath final : public DecisionDatapath
{
public:
  struct Step
  {
    bool acc_l = false;
    bool acc_r = false;
    int iter_l = 1;
    int iter_r = 1;
  };
  explicit ScriptedDatapath(std::vector<Step> steps)
    : steps_(std::move(steps))
  {
  }

private:
  std::pair<bool, int> decide(Lane lane, int attempt) override;
  void begin_round() override;

  std::vector<Step> steps_;
  std::size_t next_ = 0;
};

struct TaskResult
{
  double z_l = 0.0;
  double z_r = 0.0;
  FsmTrace trace;
};

inline constexpr int kMaxRounds = 10000;

class BiSampler
{
public:
  BiSampler(Datapath& dp, Policy policy = Policy::with_assist, CycleCosts costs = {});

  // One task from PRE to F_ADD. The machine returns to IDLE afterwards
  // unless more tasks are pending, in which case F_ADD leads to PRE.
  // Throws std::runtime_error after kMaxRounds loop rounds.
  TaskResult run_task(const SampleTask& task, bool more_pending = false);

  // INIT and IDLE records, which are not part of any task.
  const std::vector<StateRecord>& machine_log() const noexcept { return log_; }
  std::uint64_t cycle() const noexcept { return clock_; }
  Policy policy() const noexcept { return policy_; }
  const CycleCosts& costs() const noexcept { return costs_; }

private:
  Datapath* dp_;
  Policy policy_;
  CycleCosts costs_;
  std::uint64_t clock_ = 0;
  std::uint64_t next_task_ = 0;
  std::vector<StateRecord> log_;
};

// {task_id, seed, states:[{name,cycles}], total_cycles, retries_l, retries_r, switches}
std::string trace_to_json(const FsmTrace& t, std::string_view seed_hex);

} // namespace bisampler
