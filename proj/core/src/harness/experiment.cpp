#include "llpl/harness/experiment.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "llpl/baselines/lll.hpp"
#include "llpl/baselines/mpc.hpp"
#include "llpl/baselines/retrain.hpp"
#include "llpl/baselines/rl.hpp"
#include "llpl/error.hpp"
#include "llpl/il/demonstration.hpp"
#include "llpl/log.hpp"
#include "llpl/nn/checkpoint.hpp"
#include "llpl/sim/scenario.hpp"

namespace llpl::harness {

namespace {

std::uint64_t noise_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed * 7919ULL + stream;
}

EpochSummary epoch_summary(const std::string& label, const sim::DrivingLog& log, bool off_path) {
  EpochSummary e;
  e.label = label;
  e.metrics = trajectory_metrics(log);
  e.off_path = off_path;
  return e;
}

/// Drives the schedule with a fixed controller.
RunOutcome drive_frozen(const sim::Controller& controller, const lifelong::Environment& env,
                        const lifelong::Schedule& schedule) {
  const sim::ReferencePath& path = *env.path;
  RunOutcome run;
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
    sim::LegResult leg =
        sim::run_leg(path, sl.leg, state, station, steer, t, controller, env.params, env.sim, env.leg);
    state = leg.final_state;
    station = leg.final_station;
    steer = leg.final_steer;
    t = leg.end_time;
    run.summary.epochs.push_back(epoch_summary(sl.label, leg.log, leg.off_path));
    run.logs.push_back(std::move(leg.log));
    restart = leg.off_path;
    if (restart && i + 1 < schedule.legs.size() && !schedule.legs[i + 1].reset) {
      ++run.restarts;
      log::warn("leg " + sl.label + " left the path; the next leg restarts on the path");
    }
  }
  return run;
}

RunOutcome from_loop(lifelong::LoopResult loop, il::Policy policy, lifelong::EpisodicMemory memory) {
  RunOutcome run;
  for (auto& leg : loop.legs) {
    EpochSummary e = epoch_summary(leg.label, leg.log, leg.off_path);
    e.mem_size = static_cast<std::int64_t>(leg.n_mem_after);
    e.mem_increment =
        static_cast<std::int64_t>(leg.n_mem_after) - static_cast<std::int64_t>(leg.n_mem_before);
    e.screened_count = static_cast<std::int64_t>(leg.n_screened);
    e.update_wall_s = leg.update ? leg.update->wall_s : 0.0;
    run.summary.epochs.push_back(std::move(e));
    run.logs.push_back(std::move(leg.log));
    leg.log = {};
  }
  run.restarts = loop.restarts;
  run.loop = std::move(loop);
  run.final_policy = std::move(policy);
  run.memory = std::move(memory);
  return run;
}

lifelong::LoopOptions loop_options(const ExperimentConfig& cfg) {
  lifelong::LoopOptions options;
  options.eval = cfg.llpl;
  options.seed = cfg.seed;
  if (cfg.noise.enabled()) {
    options.corrupt_log = [noise = cfg.noise, seed = cfg.seed](const sim::DrivingLog& log,
                                                               std::size_t leg) {
      return corrupt_log(log, noise, noise_seed(seed, leg + 1));
    };
  }
  return options;
}

std::optional<std::size_t> capacity_of(const ExperimentConfig& cfg) {
  if (cfg.memory_capacity == 0) return std::nullopt;
  return cfg.memory_capacity;
}

}  // namespace

DemoArtifacts make_demo(const ExperimentConfig& cfg) {
  sim::DrivingLog log = il::generate_demonstration(cfg.vehicle, cfg.sim, cfg.demo, cfg.seed);
  return demo_from_log(cfg, std::move(log));
}

DemoArtifacts demo_from_log(const ExperimentConfig& cfg, sim::DrivingLog log) {
  DemoArtifacts d;
  d.data = il::extract_samples(log, cfg.sim.window_steps(), cfg.extract);
  d.normalizer = nn::Normalizer::fit(il::feature_matrix(d.data.samples));
  d.log = std::move(log);
  return d;
}

sim::DrivingLog corrupt_log(const sim::DrivingLog& log, const NoiseConfig& noise, std::uint64_t seed) {
  if (!noise.enabled()) return log;
  sim::DrivingLog out = log;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& r : out.records) {
    r.state.vy += noise.sigma_vy * unit(rng);
    r.state.yaw_rate += noise.sigma_yaw_rate * unit(rng);
    r.steer += noise.sigma_steer_log * unit(rng);
  }
  return out;
}

TrainedPolicy train_policy(const ExperimentConfig& cfg, const DemoArtifacts& demo) {
  TrainedPolicy t;
  t.untrained = il::Policy::create(cfg.seed);
  t.untrained.normalizer = demo.normalizer;
  t.policy = t.untrained;
  il::TrainOptions options = cfg.il;
  options.seed = cfg.seed;
  t.report = il::train_il(t.policy.model, demo.data, t.policy.normalizer, options);
  return t;
}

sim::ReferencePath build_path(const ExperimentConfig& cfg) {
  return sim::build_scenario(cfg.scenario, cfg.scenario_params);
}

lifelong::Schedule build_schedule(const ExperimentConfig& cfg, const sim::ReferencePath& path) {
  const auto& s = cfg.schedule;
  switch (s.protocol) {
    case Protocol::kRevisit:
      return lifelong::Schedule::revisits(path, s.speed, s.epochs, s.update_after_last);
    case Protocol::kSections:
      return lifelong::Schedule::sections(path, s.section_speeds);
    case Protocol::kFixedDuration:
      return lifelong::Schedule::fixed_duration(path, s.speed, s.update_duration);
  }
  throw Error(ErrorKind::kConfig, "unknown protocol");
}

lifelong::Environment make_environment(const ExperimentConfig& cfg, const sim::ReferencePath& path) {
  lifelong::Environment env;
  env.path = &path;
  env.params = cfg.vehicle;
  env.sim = cfg.sim;
  env.extract = cfg.extract;
  env.leg.off_path_limit = cfg.off_path_limit;
  return env;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const DemoArtifacts& demo,
                          const TrainedPolicy& trained) {
  const sim::ReferencePath path = build_path(cfg);
  const lifelong::Schedule schedule = build_schedule(cfg, path);
  const lifelong::Environment env = make_environment(cfg, path);

  RunOutcome run;
  switch (cfg.method) {
    case Method::kIl: {
      run = drive_frozen(il::make_controller(trained.policy, env.params, env.sim), env, schedule);
      run.final_policy = trained.policy;
      break;
    }
    case Method::kMpc: {
      run = drive_frozen(baselines::make_mpc_controller(cfg.mpc, env.params, env.sim), env, schedule);
      break;
    }
    case Method::kLlpl: {
      il::Policy policy = trained.policy;
      lifelong::EpisodicMemory memory = lifelong::init_memory(
          demo.data, cfg.llpl.eta_m, policy.normalizer, cfg.seed, capacity_of(cfg), cfg.llpl.metric);
      log::info("episodic memory initialized with " + std::to_string(memory.size()) + " of " +
                std::to_string(demo.data.size()) + " demonstration samples");
      std::vector<il::Policy> snapshots;
      auto options = loop_options(cfg);
      options.on_leg_end = [&snapshots](std::size_t, const il::Policy& p, const lifelong::EpisodicMemory&) {
        snapshots.push_back(p);
      };
      lifelong::LoopResult loop = lifelong::run_llpl_loop(policy, memory, env, schedule, options);
      run = from_loop(std::move(loop), std::move(policy), std::move(memory));
      run.leg_policies = std::move(snapshots);
      break;
    }
    case Method::kLll: {
      il::Policy policy = trained.policy;
      lifelong::EpisodicMemory memory =
          baselines::random_memory(demo.data, cfg.lll_sample_ratio, policy.normalizer, cfg.seed);
      std::vector<il::Policy> snapshots;
      auto options = loop_options(cfg);
      options.on_leg_end = [&snapshots](std::size_t, const il::Policy& p, const lifelong::EpisodicMemory&) {
        snapshots.push_back(p);
      };
      lifelong::LoopResult loop =
          baselines::run_lll_baseline(policy, memory, env, schedule, options, cfg.lll_sample_ratio);
      run = from_loop(std::move(loop), std::move(policy), std::move(memory));
      run.leg_policies = std::move(snapshots);
      break;
    }
    case Method::kIlRetrain: {
      il::TrainOptions options = cfg.il;
      options.seed = cfg.seed;
      baselines::RetrainResult r = baselines::run_il_retrain_baseline(
          trained.untrained, trained.policy, demo.data, env, schedule, options);
      std::int64_t prev = static_cast<std::int64_t>(demo.data.size());
      for (auto& leg : r.legs) {
        EpochSummary e = epoch_summary(leg.label, leg.log, leg.off_path);
        e.mem_size = leg.retrained ? static_cast<std::int64_t>(leg.train_size) : prev;
        e.mem_increment = e.mem_size - prev;
        e.screened_count = e.mem_increment;
        e.update_wall_s = leg.train_wall_s;
        prev = e.mem_size;
        run.summary.epochs.push_back(std::move(e));
        run.logs.push_back(std::move(leg.log));
      }
      run.restarts = r.restarts;
      run.final_policy = std::move(r.final_policy);
      break;
    }
    case Method::kRl: {
      baselines::RlResult r =
          baselines::run_rl_baseline(trained.policy, demo.log, env, schedule, cfg.rl, cfg.seed);
      std::int64_t prev = 0;
      for (auto& leg : r.legs) {
        EpochSummary e = epoch_summary(leg.label, leg.log, leg.off_path);
        e.mem_size = leg.updated ? static_cast<std::int64_t>(leg.replay_size) : prev;
        e.mem_increment = prev == 0 ? 0 : e.mem_size - prev;
        e.update_wall_s = leg.update_wall_s;
        prev = e.mem_size;
        run.summary.epochs.push_back(std::move(e));
        run.logs.push_back(std::move(leg.log));
      }
      run.restarts = r.restarts;
      run.non_finite = r.non_finite;
      run.final_policy = std::move(r.final_actor);
      break;
    }
  }
  run.summary.method = to_string(cfg.method);
  return run;
}

void write_run_outputs(const std::filesystem::path& dir, RunOutcome& run) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < run.logs.size(); ++i) {
    auto& e = run.summary.epochs[i];
    e.trajectory = "traj_" + e.label + ".csv";
    sim::write_log_csv(dir / e.trajectory, run.logs[i]);
  }
  write_summary_csv(dir / "summary.csv", run.summary);
  if (run.loop) lifelong::write_update_reports_csv(dir / "update_reports.csv", *run.loop);
  if (run.memory) lifelong::write_memory_csv(dir / "memory.csv", *run.memory);
  for (std::size_t i = 0; i < run.leg_policies.size() && i < run.summary.epochs.size(); ++i) {
    run.leg_policies[i].save(dir / ("policy_" + run.summary.epochs[i].label + ".ckpt"));
  }
  if (run.final_policy) run.final_policy->save(dir / "final_policy.ckpt");
}

void write_normalizer_csv(const std::filesystem::path& file, const nn::Normalizer& normalizer) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  static const char* kNames[] = {"vx", "vy", "yaw_rate", "dy_body", "dpsi"};
  out << "feature,mean,std\n";
  for (Eigen::Index i = 0; i < normalizer.dim(); ++i) {
    const std::string name = i < 5 ? kNames[i] : "f" + std::to_string(i);
    out << name << ',' << normalizer.mean(i) << ',' << normalizer.std(i) << '\n';
  }
}

nn::Normalizer read_normalizer_csv(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw Error(ErrorKind::kMissingArtifact, "no normalizer at " + file.string());
  }
  std::ifstream in(file);
  std::string line;
  if (!std::getline(in, line) || line != "feature,mean,std") {
    throw Error(ErrorKind::kIo, "unexpected normalizer header in " + file.string());
  }
  std::vector<double> mean, std;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, m, s;
    if (!std::getline(ss, name, ',') || !std::getline(ss, m, ',') || !std::getline(ss, s)) {
      throw Error(ErrorKind::kIo, "bad normalizer row in " + file.string());
    }
    try {
      mean.push_back(std::stod(m));
      std.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kIo, "bad normalizer value in " + file.string());
    }
  }
  nn::Normalizer n;
  n.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  n.std = Eigen::Map<Eigen::VectorXd>(std.data(), static_cast<Eigen::Index>(std.size()));
  return n;
}

}  // namespace llpl::harness
