#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/lifelong/memory.hpp"
#include "llpl/lifelong/update.hpp"
#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::lifelong {

/// How incremental data is filtered before training and folded into memory.
struct KnowledgeRule {
  std::function<il::Dataset(const il::Dataset& incremental, const EpisodicMemory& memory)> screen;
  std::function<EpisodicMemory(const EpisodicMemory& memory, const il::Dataset& incremental,
                               const il::Dataset& screened, std::uint64_t seed)>
      grow;
};

/// Screening with eta_d, neighborhood-winner memory update with eta_m.
KnowledgeRule evaluation_rule(const EvalConfig& cfg);

struct ScheduledLeg {
  sim::Leg leg;
  bool reset = true;         // restart on the path at leg.start_station, else continue
  bool update_after = true;  // trigger an update once the leg is driven
  std::string label;
};

struct Schedule {
  std::vector<ScheduledLeg> legs;

  std::size_t trigger_count() const;

  /// `passes` full drives of the path, each from a fresh start, with an
  /// update between consecutive passes and optionally after the last one.
  static Schedule revisits(const sim::ReferencePath& path, double speed, int passes,
                           bool update_after_last = false);
  /// One continuous drive, one leg per path section at the given speeds, with
  /// an update at every internal section boundary.
  static Schedule sections(const sim::ReferencePath& path, const std::vector<double>& speeds);
  /// One continuous drive at `speed` cut into legs of `duration` seconds,
  /// with an update after every leg but the last.
  static Schedule fixed_duration(const sim::ReferencePath& path, double speed, double duration);
};

struct Environment {
  const sim::ReferencePath* path = nullptr;
  sim::VehicleParams params;
  sim::SimConfig sim;
  il::ExtractOptions extract;
  sim::LegOptions leg;
};

struct LoopOptions {
  EvalConfig eval;
  std::uint64_t seed = 1;
  /// Defaults to evaluation_rule(eval).
  std::optional<KnowledgeRule> rule;
  /// Applied to each driven log before sample extraction (sensor corruption).
  std::function<sim::DrivingLog(const sim::DrivingLog&, std::size_t leg_index)> corrupt_log;
  /// Called after every leg, once its update (if any) is done.
  std::function<void(std::size_t leg_index, const il::Policy&, const EpisodicMemory&)> on_leg_end;
};

struct LegOutcome {
  std::string label;
  sim::DrivingLog log;
  bool off_path = false;
  bool triggered = false;  // an update trigger fired after this leg
  bool trained = false;    // the policy was actually updated
  std::size_t n_incremental = 0;
  std::size_t n_screened = 0;
  std::size_t n_mem_before = 0;
  std::size_t n_mem_after = 0;
  std::optional<UpdateReport> update;
};

struct LoopResult {
  std::vector<LegOutcome> legs;
  std::size_t restarts = 0;  // continuing legs restarted because the previous leg left the path
};

/// Act, collect, and on each trigger screen, update the policy, and update the
/// memory. A leg that leaves the path contributes no data, and the next leg
/// starts afresh on the path at its start station.
LoopResult run_llpl_loop(il::Policy& policy, EpisodicMemory& memory, const Environment& env,
                         const Schedule& schedule, const LoopOptions& options);

/// Update-report CSV, one row per fired trigger.
void write_update_reports_csv(const std::filesystem::path& file, const LoopResult& result);

}  // namespace llpl::lifelong
