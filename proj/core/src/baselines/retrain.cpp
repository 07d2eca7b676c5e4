#include "llpl/baselines/retrain.hpp"

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::baselines {

RetrainResult run_il_retrain_baseline(const il::Policy& untrained, const il::Policy& trained,
                                      const il::Dataset& demonstration,
                                      const lifelong::Environment& env,
                                      const lifelong::Schedule& schedule,
                                      const il::TrainOptions& options) {
  if (env.path == nullptr) throw Error(ErrorKind::kConfig, "environment has no path");
  const sim::ReferencePath& path = *env.path;
  il::Policy policy = trained;
  il::Dataset pool = demonstration;
  pool.provenance = "demonstration+execution";

  RetrainResult result;
  sim::VehicleState state;
  double station = 0.0, steer = 0.0, t = 0.0;
  bool restart = false;
  for (std::size_t i = 0; i < schedule.legs.size(); ++i) {
    const auto& sl = schedule.legs[i];
    if (sl.reset || restart) {
      station = sl.leg.start_station;
      state = sim::state_on_path(path, station, sl.leg.speed);
      steer = 0.0;
      t = 0.0;
    }
    const sim::Controller controller = il::make_controller(policy, env.params, env.sim);
    sim::LegResult leg =
        sim::run_leg(path, sl.leg, state, station, steer, t, controller, env.params, env.sim, env.leg);
    state = leg.final_state;
    station = leg.final_station;
    steer = leg.final_steer;
    t = leg.end_time;

    RetrainLegOutcome out;
    out.label = sl.label;
    out.off_path = leg.off_path;
    out.log = std::move(leg.log);
    if (sl.update_after && !out.off_path) {
      try {
        const il::Dataset exec = il::extract_samples(out.log, env.sim.window_steps(), env.extract);
        pool.samples.insert(pool.samples.end(), exec.samples.begin(), exec.samples.end());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kLogTooShort) throw;
        log::warn("leg " + sl.label + ": log too short for sample extraction");
      }
      policy.model = untrained.model;
      const il::TrainReport report = il::train_il(policy.model, pool, policy.normalizer, options);
      out.retrained = true;
      out.train_size = pool.size();
      out.train_loss = report.final_loss();
      out.train_wall_s = report.wall_s;
      log::info("retrained on " + std::to_string(pool.size()) + " samples in " +
                std::to_string(report.wall_s) + " s");
    }
    result.legs.push_back(std::move(out));
    restart = result.legs.back().off_path;
    if (restart && i + 1 < schedule.legs.size() && !schedule.legs[i + 1].reset) ++result.restarts;
  }
  result.final_policy = policy;
  return result;
}

}  // namespace llpl::baselines
