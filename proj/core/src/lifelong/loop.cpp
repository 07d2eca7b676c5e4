#include "llpl/lifelong/loop.hpp"

#include <cmath>
#include <fstream>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::lifelong {

KnowledgeRule evaluation_rule(const EvalConfig& cfg) {
  KnowledgeRule rule;
  rule.screen = [eta_d = cfg.eta_d](const il::Dataset& incremental, const EpisodicMemory& memory) {
    return screen_incremental(incremental, memory, eta_d);
  };
  rule.grow = [eta_m = cfg.eta_m](const EpisodicMemory& memory, const il::Dataset&,
                                  const il::Dataset& screened, std::uint64_t) {
    return update_memory(memory, screened, eta_m);
  };
  return rule;
}

std::size_t Schedule::trigger_count() const {
  std::size_t n = 0;
  for (const auto& l : legs) n += l.update_after ? 1 : 0;
  return n;
}

Schedule Schedule::revisits(const sim::ReferencePath& path, double speed, int passes,
                           bool update_after_last) {
  Schedule s;
  for (int i = 0; i < passes; ++i) {
    ScheduledLeg l;
    l.leg = sim::Leg{0.0, path.length(), speed};
    l.reset = true;
    l.update_after = update_after_last || i + 1 < passes;
    l.label = "epoch" + std::to_string(i + 1);
    s.legs.push_back(l);
  }
  return s;
}

Schedule Schedule::sections(const sim::ReferencePath& path, const std::vector<double>& speeds) {
  const int count = path.section_count();
  if (static_cast<int>(speeds.size()) != count) {
    throw Error(ErrorKind::kConfig, "expected " + std::to_string(count) + " section speeds, got " +
                                        std::to_string(speeds.size()));
  }
  const auto& bounds = path.section_boundaries();
  Schedule s;
  for (int i = 0; i < count; ++i) {
    ScheduledLeg l;
    const double lo = i == 0 ? 0.0 : bounds[static_cast<std::size_t>(i - 1)];
    const double hi = i + 1 < count ? bounds[static_cast<std::size_t>(i)] : path.length();
    l.leg = sim::Leg{lo, hi, speeds[static_cast<std::size_t>(i)]};
    l.reset = i == 0;
    l.update_after = i + 1 < count;
    l.label = "S" + std::to_string(i + 1);
    s.legs.push_back(l);
  }
  return s;
}

Schedule Schedule::fixed_duration(const sim::ReferencePath& path, double speed, double duration) {
  if (!(speed > 0.0) || !(duration > 0.0)) {
    throw Error(ErrorKind::kConfig, "fixed-duration schedule needs positive speed and duration");
  }
  const double stride = speed * duration;
  Schedule s;
  for (double lo = 0.0; lo < path.length(); lo += stride) {
    ScheduledLeg l;
    l.leg = sim::Leg{lo, std::min(lo + stride, path.length()), speed};
    l.reset = s.legs.empty();
    l.update_after = true;
    l.label = "T" + std::to_string(s.legs.size() + 1);
    s.legs.push_back(l);
  }
  if (!s.legs.empty()) s.legs.back().update_after = false;
  return s;
}

LoopResult run_llpl_loop(il::Policy& policy, EpisodicMemory& memory, const Environment& env,
                         const Schedule& schedule, const LoopOptions& options) {
  if (env.path == nullptr) throw Error(ErrorKind::kConfig, "environment has no path");
  const sim::ReferencePath& path = *env.path;
  const KnowledgeRule rule = options.rule ? *options.rule : evaluation_rule(options.eval);
  const sim::Controller controller = il::make_controller(policy, env.params, env.sim);

  LoopResult result;
  sim::VehicleState state;
  double station = 0.0, steer = 0.0, t = 0.0;
  bool restart = false;

  for (std::size_t i = 0; i < schedule.legs.size(); ++i) {
    const ScheduledLeg& sl = schedule.legs[i];
    if (sl.reset || restart) {
      station = sl.leg.start_station;
      state = sim::state_on_path(path, station, sl.leg.speed);
      steer = 0.0;
      t = 0.0;
    }
    sim::LegResult leg =
        sim::run_leg(path, sl.leg, state, station, steer, t, controller, env.params, env.sim, env.leg);
    state = leg.final_state;
    station = leg.final_station;
    steer = leg.final_steer;
    t = leg.end_time;

    LegOutcome out;
    out.label = sl.label;
    out.off_path = leg.off_path;
    out.n_mem_before = memory.size();
    out.n_mem_after = memory.size();
    out.log = std::move(leg.log);

    if (sl.update_after && !out.off_path) {
      out.triggered = true;
      const std::uint64_t seed = options.seed * 1000003ULL + i;
      const sim::DrivingLog training_log =
          options.corrupt_log ? options.corrupt_log(out.log, i) : out.log;
      il::Dataset incremental;
      try {
        incremental = il::extract_samples(training_log, env.sim.window_steps(), env.extract);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kLogTooShort) throw;
        log::warn("leg " + sl.label + ": log too short for sample extraction");
      }
      incremental.provenance = "execution-" + sl.label;
      const il::Dataset screened = rule.screen(incremental, memory);
      out.n_incremental = incremental.size();
      out.n_screened = screened.size();
      if (screened.empty()) {
        log::info("leg " + sl.label + ": nothing passed screening, update skipped");
      } else {
        out.update = lifelong_update(policy, screened, memory, options.eval, seed);
        out.trained = true;
      }
      memory = rule.grow(memory, incremental, screened, seed);
      out.n_mem_after = memory.size();
    } else if (sl.update_after) {
      log::info("leg " + sl.label + " left the path; its data is not learned from");
    }
    if (options.on_leg_end) options.on_leg_end(i, policy, memory);
    result.legs.push_back(std::move(out));

    restart = result.legs.back().off_path;
    if (restart && i + 1 < schedule.legs.size() && !schedule.legs[i + 1].reset) {
      ++result.restarts;
      log::warn("leg " + sl.label + " left the path; the next leg restarts on the path");
    }
  }
  return result;
}

void write_update_reports_csv(const std::filesystem::path& file, const LoopResult& result) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "trigger_id,n_incremental,n_screened,n_mem_before,n_mem_after,loss_data_pre,"
         "loss_data_post,loss_mem_pre,loss_mem_post,proj_rate,update_wall_s\n";
  int id = 0;
  for (const auto& leg : result.legs) {
    if (!leg.triggered) continue;
    ++id;
    const UpdateReport r = leg.update.value_or(UpdateReport{});
    out << id << ',' << leg.n_incremental << ',' << leg.n_screened << ',' << leg.n_mem_before << ','
        << leg.n_mem_after << ',' << r.loss_data_pre << ',' << r.loss_data_post << ','
        << r.loss_mem_pre << ',' << r.loss_mem_post << ',' << r.projection_rate() << ','
        << r.wall_s << '\n';
  }
}

}  // namespace llpl::lifelong
