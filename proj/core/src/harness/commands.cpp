#include "llpl/harness/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "llpl/harness/experiment.hpp"
#include "llpl/harness/summary.hpp"
#include "llpl/il/policy.hpp"
#include "llpl/log.hpp"

namespace llpl::harness {

namespace {

constexpr const char* kDemoLog = "demo_log.csv";
constexpr const char* kDemoDataset = "demo_dataset.csv";
constexpr const char* kNormalizer = "normalizer.csv";
constexpr const char* kPolicy = "policy.ckpt";

std::filesystem::path require(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw Error(ErrorKind::kMissingArtifact, "missing artifact " + file.string());
  }
  return file;
}

void prepare_output(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  write_config(cfg.output_dir / "config.ini", cfg);
}

bool needs_dataset(Method m) {
  return m == Method::kLlpl || m == Method::kLll || m == Method::kIlRetrain;
}

bool needs_policy(Method m) { return m != Method::kMpc; }

void write_train_report(const std::filesystem::path& file, const il::TrainReport& report) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "epoch,loss\n0," << report.initial_loss << '\n';
  for (std::size_t i = 0; i < report.epoch_loss.size(); ++i) {
    out << i + 1 << ',' << report.epoch_loss[i] << '\n';
  }
}

int run_status(const RunOutcome& run) {
  if (run.non_finite) {
    log::error(run.summary.method + ": non-finite loss during updates");
    return kExitRunFailure;
  }
  if (run.summary.any_off_path()) {
    log::error(run.summary.method + ": at least one epoch left the path");
    return kExitRunFailure;
  }
  return kExitOk;
}

double final_rmse(const RunSummary& s) {
  return s.epochs.empty() ? 0.0 : s.epochs.back().metrics.rmse_e_lat;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kMissingArtifact:
    case ErrorKind::kMissingRun:
      return kExitMissing;
    default:
      return kExitRunFailure;
  }
}

int cmd_demo_gen(const ExperimentConfig& cfg) {
  prepare_output(cfg);
  const DemoArtifacts demo = make_demo(cfg);
  sim::write_log_csv(cfg.output_dir / kDemoLog, demo.log);
  il::write_dataset_csv(cfg.output_dir / kDemoDataset, demo.data);
  write_normalizer_csv(cfg.output_dir / kNormalizer, demo.normalizer);
  log::info("demonstration: " + std::to_string(demo.log.records.size()) + " log rows, " +
            std::to_string(demo.data.size()) + " samples");
  return kExitOk;
}

int cmd_train_il(const ExperimentConfig& cfg) {
  const auto dir = cfg.artifacts();
  DemoArtifacts demo;
  demo.data = il::read_dataset_csv(require(dir / kDemoDataset));
  demo.normalizer = read_normalizer_csv(require(dir / kNormalizer));
  prepare_output(cfg);
  const TrainedPolicy t = train_policy(cfg, demo);
  t.policy.save(cfg.output_dir / kPolicy);
  write_train_report(cfg.output_dir / "train_report.csv", t.report);
  log::info("trained on " + std::to_string(demo.data.size()) + " samples, final loss " +
            std::to_string(t.report.final_loss()) + " in " + std::to_string(t.report.wall_s) + " s");
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg) {
  const auto dir = cfg.artifacts();
  DemoArtifacts demo;
  TrainedPolicy trained;
  if (needs_policy(cfg.method)) {
    trained.policy = il::Policy::load(require(dir / kPolicy));
    trained.untrained = il::Policy::create(cfg.seed);
    trained.untrained.normalizer = trained.policy.normalizer;
    demo.normalizer = trained.policy.normalizer;
  }
  if (needs_dataset(cfg.method)) demo.data = il::read_dataset_csv(require(dir / kDemoDataset));
  if (cfg.method == Method::kRl) demo.log = sim::read_log_csv(require(dir / kDemoLog), cfg.sim.control_period);
  prepare_output(cfg);

  RunOutcome run = run_experiment(cfg, demo, trained);
  write_run_outputs(cfg.output_dir, run);
  for (const auto& e : run.summary.epochs) {
    log::info(run.summary.method + " " + e.label + ": rmse_e_lat " + std::to_string(e.metrics.rmse_e_lat) +
              (e.off_path ? " (off path)" : ""));
  }
  return run_status(run);
}

int cmd_compare(const ExperimentConfig& cfg) {
  if (cfg.compare_runs.empty()) throw Error(ErrorKind::kConfig, "compare.runs is empty");
  std::vector<RunSummary> runs;
  for (const auto& r : cfg.compare_runs) runs.push_back(read_summary_csv(r / "summary.csv"));
  std::size_t baseline = 0;
  if (!cfg.compare_baseline.empty()) {
    const auto it = std::find_if(runs.begin(), runs.end(),
                                 [&](const RunSummary& s) { return s.method == cfg.compare_baseline; });
    if (it == runs.end()) {
      throw Error(ErrorKind::kMissingRun, "no run of method '" + cfg.compare_baseline + "'");
    }
    baseline = static_cast<std::size_t>(it - runs.begin());
  }
  prepare_output(cfg);
  write_comparison_csv(cfg.output_dir / "comparison.csv", compare_summaries(runs, baseline));
  return kExitOk;
}

int cmd_noise_replay(const ExperimentConfig& cfg) {
  const auto dir = cfg.artifacts();
  const sim::DrivingLog clean_log = sim::read_log_csv(require(dir / kDemoLog), cfg.sim.control_period);
  TrainedPolicy clean;
  clean.policy = il::Policy::load(require(dir / kPolicy));
  prepare_output(cfg);

  const DemoArtifacts clean_demo = demo_from_log(cfg, clean_log);

  DemoArtifacts noisy_demo = clean_demo;
  TrainedPolicy noisy = clean;
  if (cfg.noise.enabled() && cfg.noise.corrupt_demonstration) {
    noisy_demo = demo_from_log(cfg, corrupt_log(clean_log, cfg.noise, cfg.seed * 7919ULL));
    noisy = train_policy(cfg, noisy_demo);
    log::info("noisy demonstration policy trained, final loss " + std::to_string(noisy.report.final_loss()));
  }

  struct Variant {
    const char* name;
    Method method;
    bool noisy;
  };
  const Variant variants[] = {{"llpl_noisy", Method::kLlpl, true},
                              {"il_noisy", Method::kIl, true},
                              {"llpl", Method::kLlpl, false}};
  std::vector<RunSummary> summaries;
  int status = kExitOk;
  for (const auto& v : variants) {
    ExperimentConfig vc = cfg;
    vc.method = v.method;
    if (!v.noisy) vc.noise = NoiseConfig{};
    RunOutcome run = run_experiment(vc, v.noisy ? noisy_demo : clean_demo, v.noisy ? noisy : clean);
    run.summary.method = v.name;
    write_run_outputs(cfg.output_dir / v.name, run);
    status = std::max(status, run_status(run));
    summaries.push_back(run.summary);
  }

  std::ofstream out(cfg.output_dir / "noise_report.csv");
  if (!out) throw Error(ErrorKind::kIo, "cannot write noise_report.csv");
  out.precision(17);
  out << "variant,final_rmse_e_lat,final_mean_abs_e_lat,pct_vs_clean_llpl\n";
  const double clean_rmse = final_rmse(summaries.back());
  for (const auto& s : summaries) {
    const double r = final_rmse(s);
    const double mae = s.epochs.empty() ? 0.0 : s.epochs.back().metrics.mean_abs_e_lat;
    const double pct = clean_rmse > 0.0 ? 100.0 * (r - clean_rmse) / clean_rmse : 0.0;
    out << s.method << ',' << r << ',' << mae << ',' << pct << '\n';
    log::info(s.method + ": final rmse_e_lat " + std::to_string(r));
  }
  write_comparison_csv(cfg.output_dir / "comparison.csv", compare_summaries(summaries, 1));
  return status;
}

int run_command(const CommandLine& cl) {
  try {
    ExperimentConfig cfg = load_config(cl.config);
    if (cl.seed) cfg.seed = *cl.seed;
    if (cl.out) cfg.output_dir = *cl.out;
    if (cl.command == "demo-gen") return cmd_demo_gen(cfg);
    if (cl.command == "train-il") return cmd_train_il(cfg);
    if (cl.command == "run") return cmd_run(cfg);
    if (cl.command == "compare") return cmd_compare(cfg);
    if (cl.command == "noise-replay") return cmd_noise_replay(cfg);
    throw Error(ErrorKind::kConfig, "unknown command '" + cl.command + "'");
  } catch (const Error& e) {
    log::error(e.what());
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    log::error(e.what());
    return kExitRunFailure;
  }
}

}  // namespace llpl::harness
