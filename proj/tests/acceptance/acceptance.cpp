// Acceptance suite: one PASS/FAIL line per criterion.
//
//   llpl_acceptance [--criterion N] [--work DIR]
//
// Without --criterion every criterion runs in order. Per-criterion detail
// tables are written to the work directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llpl/baselines/mpc.hpp"
#include "llpl/baselines/rl.hpp"
#include "llpl/harness/experiment.hpp"
#include "llpl/il/policy.hpp"
#include "llpl/lifelong/agem.hpp"
#include "llpl/lifelong/memory.hpp"
#include "llpl/lifelong/update.hpp"
#include "llpl/log.hpp"
#include "llpl/nn/mlp.hpp"
#include "llpl/sim/scenario.hpp"
#include "oracles.hpp"

using namespace llpl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path g_work;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::ofstream table(const std::string& name, const std::string& header) {
  std::ofstream out(g_work / name);
  out.precision(10);
  out << header << '\n';
  return out;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

struct World {
  harness::ExperimentConfig cfg;
  harness::DemoArtifacts demo;
  harness::TrainedPolicy trained;
};

World build_world(harness::ExperimentConfig cfg) {
  World w;
  w.cfg = std::move(cfg);
  w.demo = harness::make_demo(w.cfg);
  w.trained = harness::train_policy(w.cfg, w.demo);
  return w;
}

harness::RunOutcome run_method(const World& w, harness::Method m) {
  auto cfg = w.cfg;
  cfg.method = m;
  return harness::run_experiment(cfg, w.demo, w.trained);
}

std::vector<double> rmse_series(const harness::RunOutcome& run) {
  std::vector<double> out;
  for (const auto& e : run.summary.epochs) out.push_back(e.metrics.rmse_e_lat);
  return out;
}

std::string series(const std::vector<double>& v, double scale = 1000.0) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "/" : "") + fmt(v[i] * scale, 3);
  return s;
}

harness::ExperimentConfig revisit_config(std::uint64_t seed, int epochs) {
  harness::ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.scenario = sim::ScenarioId::kDoubleLaneChange;
  cfg.schedule.protocol = harness::Protocol::kRevisit;
  cfg.schedule.speed = 12.0;
  cfg.schedule.epochs = epochs;
  return cfg;
}

std::vector<std::vector<long double>> columns(const Eigen::MatrixXd& m) {
  std::vector<std::vector<long double>> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)].assign(m.col(c).data(), m.col(c).data() + m.rows());
  return out;
}

long double wide_mse(const testing::WideMlp& net, const std::vector<std::vector<long double>>& x,
                     const Eigen::MatrixXd& y) {
  long double acc = 0.0L;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const long double d = net.forward(x[c])[0] - y(0, static_cast<Eigen::Index>(c));
    acc += d * d;
  }
  return acc / static_cast<long double>(x.size());
}

// mean (pi(s) - steer)^2 - lambda mean Q(s, pi(s) / scale)
long double wide_actor_loss(const testing::WideMlp& actor, const testing::WideMlp& critic,
                            const std::vector<std::vector<long double>>& x, const Eigen::RowVectorXd& steer,
                            double lambda, double scale) {
  long double bc = 0.0L, q = 0.0L;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const long double a = actor.forward(x[c])[0];
    const long double d = a - steer(static_cast<Eigen::Index>(c));
    bc += d * d;
    auto in = x[c];
    in.push_back(a / scale);
    q += critic.forward(in)[0];
  }
  const auto n = static_cast<long double>(x.size());
  return bc / n - lambda * q / n;
}

std::vector<Eigen::Index> subset(Eigen::Index total, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, total - 1);
  std::vector<Eigen::Index> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
  return out;
}

// 1. Analytic gradients against central differences of an extended-precision
// re-evaluation of each loss.
Verdict gradients() {
  const auto t0 = Clock::now();
  double worst_policy = 0.0, worst_critic = 0.0, worst_actor = 0.0;
  const baselines::RlConfig rl;
  std::vector<std::size_t> critic_sizes{6};
  critic_sizes.insert(critic_sizes.end(), rl.critic_hidden.begin(), rl.critic_hidden.end());
  critic_sizes.push_back(1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto policy = il::Policy::create(seed).model;
    const Eigen::MatrixXd x = gaussian(5, 4, rng);
    const Eigen::MatrixXd y = gaussian(1, 4, rng, 0.2);
    const auto xc = columns(x);
    auto wide_policy = testing::WideMlp::from(policy);
    const auto lg = nn::backward_mse(policy, x, y);
    const auto fd = testing::wide_numeric_gradient(wide_policy, [&] { return wide_mse(wide_policy, xc, y); }, {});
    worst_policy = std::max(worst_policy, testing::max_relative_error(lg.grad.values, fd));

    // The critic has ~50k parameters; a random subset keeps the check fast.
    const auto critic = nn::MlpModel::glorot(critic_sizes, nn::Activation::kRelu, seed + 100);
    const Eigen::MatrixXd ci = gaussian(6, 4, rng);
    const Eigen::RowVectorXd targets = gaussian(1, 4, rng);
    const auto cc = columns(ci);
    auto wide_critic = testing::WideMlp::from(critic);
    const auto idx = subset(critic.parameter_count(), 500, rng);
    const auto clg = baselines::critic_loss_and_gradient(critic, ci, targets);
    const auto cfd =
        testing::wide_numeric_gradient(wide_critic, [&] { return wide_mse(wide_critic, cc, targets); }, idx);
    worst_critic = std::max(worst_critic, testing::max_relative_error(gather(clg.grad.values, idx), cfd));

    // Actor gradient of the combined loss, through the frozen critic.
    const Eigen::RowVectorXd steer = gaussian(1, 4, rng, 0.1);
    const auto aidx = subset(policy.parameter_count(), 500, rng);
    const auto alg = baselines::actor_loss_and_gradient(policy, critic, x, steer, rl.lambda_pg, 0.5);
    const auto afd = testing::wide_numeric_gradient(
        wide_policy, [&] { return wide_actor_loss(wide_policy, wide_critic, xc, steer, rl.lambda_pg, 0.5); }, aidx);
    worst_actor = std::max(worst_actor, testing::max_relative_error(gather(alg.grad.values, aidx), afd));
  }
  const double wall = seconds_since(t0);
  const double worst = std::max({worst_policy, worst_critic, worst_actor});
  return {worst < 1e-5 && wall < 30.0,
          "10 seeds, max rel err policy " + fmt(worst_policy, 3) + " (all 4609), critic " + fmt(worst_critic, 3) +
              " (500 of 50561), actor " + fmt(worst_actor, 3) + " (500) (< 1e-5), " + fmt(wall, 3) + " s (< 30)"};
}

// 2. A-GEM projection against a bisection least-norm oracle.
Verdict agem() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int bitwise_fail = 0, feasibility_fail = 0, conflicts = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd g = gaussian(1000, 1, rng);
    const Eigen::VectorXd ref = gaussian(1000, 1, rng);
    // Bias half the pairs into conflict.
    if (trial % 2 == 0) g -= (0.2 + 0.05 * (trial % 7)) * ref;
    const nn::GradientVector gv(g), rv(ref);
    const auto out = lifelong::agem_project(gv, rv);
    if (g.dot(ref) >= 0.0) {
      if (std::memcmp(out.values.data(), g.data(), sizeof(double) * 1000) != 0) ++bitwise_fail;
      continue;
    }
    ++conflicts;
    if (out.values.dot(ref) < -1e-10 * g.norm() * ref.norm()) ++feasibility_fail;
    const Eigen::VectorXd oracle = testing::least_norm_projection(g, ref);
    worst = std::max(worst, (out.values - oracle).cwiseAbs().maxCoeff());
  }
  const double wall = seconds_since(t0);
  return {bitwise_fail == 0 && feasibility_fail == 0 && worst <= 1e-8 && wall < 5.0,
          std::to_string(conflicts) + "/500 conflicting, bitwise misses " + std::to_string(bitwise_fail) +
              ", infeasible " + std::to_string(feasibility_fail) + ", max |diff| " + fmt(worst, 3) +
              " (<= 1e-8), " + fmt(wall, 3) + " s (< 5)"};
}

bool same_samples(const std::vector<il::Sample>& a, const std::vector<il::Sample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].features() != b[i].features() || a[i].steer != b[i].steer) return false;
  }
  return true;
}

// 3. Screening and memory update against brute-force double loops.
Verdict screening() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  const lifelong::EvalConfig eval;
  int screen_miss = 0, update_miss = 0;
  std::size_t kept_total = 0, replaced_total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> mem_n(1, 100), batch_n(1, 200), n_centres(3, 15);
    std::vector<il::Sample> centres;
    const std::size_t nc = n_centres(rng);
    for (std::size_t c = 0; c < nc; ++c) centres.push_back(testing::random_sample(rng));
    std::normal_distribution<double> jitter(0.0, trial % 2 == 0 ? 0.05 : 0.15);
    std::uniform_int_distribution<std::size_t> pick(0, nc - 1);
    std::uniform_real_distribution<double> steer(-0.3, 0.3);
    auto draw = [&](std::size_t n) {
      std::vector<il::Sample> out;
      for (std::size_t i = 0; i < n; ++i) {
        auto f = centres[pick(rng)].features();
        for (auto& v : f) v += jitter(rng);
        out.push_back(il::Sample::make({f[0], f[1], f[2]}, {f[3], f[4]}, steer(rng)));
      }
      return out;
    };
    lifelong::EpisodicMemory mem;
    mem.entries = draw(mem_n(rng));
    mem.eta_m = eval.eta_m;
    il::Dataset incoming;
    incoming.samples = draw(batch_n(rng));
    auto all = mem.entries;
    all.insert(all.end(), incoming.samples.begin(), incoming.samples.end());
    mem.normalizer = nn::Normalizer::fit(il::feature_matrix(all));

    const auto screened = lifelong::screen_incremental(incoming, mem, eval.eta_d);
    if (!same_samples(screened.samples,
                      testing::brute_screen(incoming.samples, mem.entries, mem.normalizer, eval.eta_d))) {
      ++screen_miss;
    }
    // Update on both the screened set and the raw batch, so merges are common.
    for (const il::Dataset* batch : {&screened, static_cast<const il::Dataset*>(&incoming)}) {
      const auto updated = lifelong::update_memory(mem, *batch, eval.eta_m);
      if (!same_samples(updated.entries,
                        testing::brute_update(mem.entries, batch->samples, mem.normalizer, eval.eta_m))) {
        ++update_miss;
      }
      replaced_total += mem.size() + batch->size() - updated.size();
    }
    kept_total += screened.size();
  }
  const double wall = seconds_since(t0);
  return {screen_miss == 0 && update_miss == 0 && wall < 10.0,
          "screen mismatches " + std::to_string(screen_miss) + "/50, update mismatches " +
              std::to_string(update_miss) + "/100 (" + std::to_string(kept_total) + " kept, " +
              std::to_string(replaced_total) + " merged away), " + fmt(wall, 3) + " s (< 10)"};
}

// 4. Inverse-dynamics policy against the analytic inverse of the plant.
Verdict inverse_dynamics() {
  const auto t0 = Clock::now();
  harness::ExperimentConfig cfg;
  cfg.seed = 1;
  const double demo_seconds =
      cfg.demo.duration_per_speed * static_cast<double>(cfg.demo.speeds.size());
  const World w = build_world(cfg);
  const auto& p = cfg.vehicle;

  // Steering envelope: the 95th percentile of |steer| in the demonstration samples.
  std::vector<double> mags;
  for (const auto& s : w.demo.data.samples) mags.push_back(std::abs(s.steer));
  std::sort(mags.begin(), mags.end());
  const double envelope = mags[mags.size() * 95 / 100];

  auto out = table("c04_grid.csv", "vx,steer0,steer,dy_body,dpsi,oracle,policy");
  double sum = 0.0, worst = 0.0;
  std::size_t n = 0;
  for (int vx = 5; vx <= 20; ++vx) {
    const auto map = testing::heading_map(p, vx, cfg.sim.horizon_window);
    for (int i = -4; i <= 4; ++i) {
      const double steer = envelope * i / 4.0;
      for (double lead : {-0.02, 0.0, 0.02}) {
        const double steer0 = std::clamp(steer + lead, -envelope, envelope);
        const Eigen::Vector2d ss = testing::steady_state(p, vx, steer0);
        sim::VehicleState s;
        s.vx = vx;
        s.vy = ss(0);
        s.yaw_rate = ss(1);
        const auto start = il::state_features(s);
        for (int k = 0; k < cfg.sim.window_steps(); ++k) s = sim::advance_control_period(s, steer, p, cfg.sim);
        const sim::TransitionFeatures tr{s.pos_y, s.yaw};
        const double oracle = map.invert(ss(0), ss(1), s.yaw);
        const double pred = w.trained.policy.raw_steer(start, tr);
        const double err = std::abs(pred - oracle);
        sum += err;
        worst = std::max(worst, err);
        ++n;
        out << vx << ',' << steer0 << ',' << steer << ',' << tr.dy_body << ',' << tr.dpsi << ',' << oracle
            << ',' << pred << '\n';
      }
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double limit = 0.05 * p.steer_limit;
  const double wall = seconds_since(t0);
  return {mean < limit && wall < 300.0,
          fmt(demo_seconds, 4) + " s demo, " + std::to_string(n) + " grid points (|steer| <= " + fmt(envelope, 3) +
              "), mean abs err " + fmt(mean, 3) + " rad (< " + fmt(limit, 3) + "), max " + fmt(worst, 3) + ", " +
              fmt(wall, 3) + " s (< 300)"};
}

// 5. Revisit improvement on the double lane change.
Verdict revisit() {
  const auto t0 = Clock::now();
  auto out = table("c05_revisit.csv", "seed,initial,revisit1,revisit2,ratio");
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const World w = build_world(revisit_config(seed, 3));
    const auto r = rmse_series(run_method(w, harness::Method::kLlpl));
    const double ratio = r[2] / r[0];
    const bool ok = r[0] > r[1] && r[1] > r[2] && ratio <= 0.7;
    pass = pass && ok;
    out << seed << ',' << r[0] << ',' << r[1] << ',' << r[2] << ',' << ratio << '\n';
    detail += "seed " + std::to_string(seed) + " " + series(r) + " mm ratio " + fmt(ratio, 3) +
              (ok ? "" : " (miss)") + "; ";
  }
  const double wall = seconds_since(t0);
  return {pass && wall < 600.0, detail + "need strict decrease and ratio <= 0.7, " + fmt(wall, 3) + " s (< 600)"};
}

// 6 and 7 share the six-epoch runs.
struct SixEpochRuns {
  std::uint64_t seed = 0;
  harness::RunOutcome llpl, lll, retrain;
};

std::vector<SixEpochRuns> six_epoch_runs(bool with_retrain) {
  std::vector<SixEpochRuns> out;
  for (std::uint64_t seed : {1, 2, 3}) {
    const World w = build_world(revisit_config(seed, 6));
    SixEpochRuns r;
    r.seed = seed;
    r.llpl = run_method(w, harness::Method::kLlpl);
    r.lll = run_method(w, harness::Method::kLll);
    if (with_retrain) r.retrain = run_method(w, harness::Method::kIlRetrain);
    out.push_back(std::move(r));
  }
  return out;
}

Verdict six_epochs() {
  const auto t0 = Clock::now();
  const auto runs = six_epoch_runs(true);
  auto out = table("c06_epochs.csv", "seed,method,epoch,rmse_e_lat");
  bool pass = true;
  std::string detail;
  for (const auto& r : runs) {
    const auto a = rmse_series(r.llpl), b = rmse_series(r.lll), c = rmse_series(r.retrain);
    for (std::size_t i = 0; i < a.size(); ++i) {
      out << r.seed << ",llpl," << i + 1 << ',' << a[i] << '\n'
          << r.seed << ",lll," << i + 1 << ',' << b[i] << '\n'
          << r.seed << ",il_retrain," << i + 1 << ',' << c[i] << '\n';
    }
    bool steady = true;
    for (std::size_t i = 1; i < a.size(); ++i) steady = steady && a[i] <= 1.05 * a[i - 1];
    const bool ok = a.back() <= b.back() && a.back() <= c.back() && steady;
    pass = pass && ok;
    detail += "seed " + std::to_string(r.seed) + " final llpl/lll/retrain " +
              series({a.back(), b.back(), c.back()}) + " mm" + (steady ? "" : " (llpl series rises)") +
              (ok ? "" : " (miss)") + "; ";
  }
  const double wall = seconds_since(t0);
  return {pass && wall < 1800.0, detail + fmt(wall, 3) + " s (< 1800)"};
}

Verdict memory_growth() {
  const auto t0 = Clock::now();
  const auto runs = six_epoch_runs(false);
  auto out = table("c07_growth.csv", "seed,method,epoch,n_incremental,n_screened,mem_increment");
  bool pass = true;
  std::string detail;
  for (const auto& r : runs) {
    const auto& legs = r.llpl.loop->legs;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      out << r.seed << ",llpl," << i + 1 << ',' << legs[i].n_incremental << ',' << legs[i].n_screened << ','
          << static_cast<long>(legs[i].n_mem_after) - static_cast<long>(legs[i].n_mem_before) << '\n';
    }
    const bool decays = legs.size() == 6 && legs[5].triggered && legs[0].triggered &&
                        legs[5].n_screened < legs[0].n_screened;
    bool exact = true;
    for (std::size_t i = 0; i < r.lll.loop->legs.size(); ++i) {
      const auto& l = r.lll.loop->legs[i];
      const long inc = static_cast<long>(l.n_mem_after) - static_cast<long>(l.n_mem_before);
      out << r.seed << ",lll," << i + 1 << ',' << l.n_incremental << ',' << l.n_screened << ',' << inc << '\n';
      if (l.triggered) {
        exact = exact && inc == static_cast<long>(std::ceil(0.1 * static_cast<double>(l.n_incremental)));
      }
    }
    pass = pass && decays && exact;
    detail += "seed " + std::to_string(r.seed) + " screened epoch1 " + std::to_string(legs[0].n_screened) +
              " epoch6 " + std::to_string(legs.size() == 6 ? legs[5].n_screened : 0) +
              (exact ? ", lll +10%" : ", lll increments off") + "; ";
  }
  return {pass, detail + fmt(seconds_since(t0), 3) + " s"};
}

// 8. Wall time of one trigger on 160 control steps of execution data.
Verdict update_budget() {
  harness::ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.scenario = sim::ScenarioId::kCurvedRoad;
  const World w = build_world(cfg);
  const auto path = harness::build_path(cfg);
  const auto env = harness::make_environment(cfg, path);
  const double speed = 12.0;
  const int steps = 160;
  const sim::Leg leg{0.0, speed * cfg.sim.control_period * steps, speed};
  const auto controller = il::make_controller(w.trained.policy, env.params, env.sim);
  const auto driven = sim::run_leg(path, leg, sim::state_on_path(path, 0.0, speed), 0.0, 0.0, 0.0, controller,
                                   env.params, env.sim, env.leg);

  il::Policy policy = w.trained.policy;
  auto memory = lifelong::init_memory(w.demo.data, cfg.llpl.eta_m, policy.normalizer, cfg.seed);
  const auto t0 = Clock::now();
  const auto incremental = il::extract_samples(driven.log, env.sim.window_steps(), env.extract);
  const auto screened = lifelong::screen_incremental(incremental, memory, cfg.llpl.eta_d);
  lifelong::UpdateReport report;
  if (!screened.empty()) report = lifelong::lifelong_update(policy, screened, memory, cfg.llpl, cfg.seed);
  memory = lifelong::update_memory(memory, screened, cfg.llpl.eta_m);
  const double wall = seconds_since(t0);
  return {wall < 5.0 && !driven.off_path,
          std::to_string(driven.log.records.size()) + " records, " + std::to_string(incremental.size()) +
              " samples, " + std::to_string(screened.size()) + " screened, " + std::to_string(report.steps) +
              " SGD steps against " + std::to_string(memory.size()) + " memory entries in " + fmt(wall, 3) +
              " s (< 5)"};
}

// 9. Condensed MPC against the Riccati recursion.
Verdict mpc_core() {
  const auto t0 = Clock::now();
  const sim::VehicleParams p;
  baselines::MpcConfig cfg;
  const Eigen::Vector4d q(cfg.weight_state[0], cfg.weight_state[1], cfg.weight_state[2], cfg.weight_state[3]);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> e_y(0.0, 0.5), e_y_dot(0.0, 0.5), e_psi(0.0, 0.05), e_psi_dot(0.0, 0.1);
  double worst = 0.0, worst_scale = 0.0, zero = 0.0;
  for (double vx : {12.0, 20.0}) {
    const auto d = baselines::linearize_error_dynamics(p, vx, cfg.period);
    zero = std::max(zero, std::abs(baselines::mpc_control(baselines::ErrorState{}, cfg, d.A, d.B)));
    for (int i = 0; i < 100; ++i) {
      const baselines::ErrorState xi{e_y(rng), e_y_dot(rng), e_psi(rng), e_psi_dot(rng)};
      const double u = baselines::mpc_control_unclipped(xi, cfg, d.A, d.B);
      const double lqr = testing::lqr_first_action(d.A, d.B, q, cfg.weight_control, cfg.horizon_steps, xi.vector());
      worst = std::max(worst, std::abs(u - lqr) / std::max(1.0, std::abs(lqr)));
      auto scaled = cfg;
      const double c = i % 2 == 0 ? 1e-3 : 250.0;
      for (auto& wq : scaled.weight_state) wq *= c;
      scaled.weight_control *= c;
      worst_scale = std::max(worst_scale, std::abs(baselines::mpc_control_unclipped(xi, scaled, d.A, d.B) - u));
    }
  }
  const double wall = seconds_since(t0);
  return {worst <= 1e-6 && zero == 0.0 && worst_scale <= 1e-9 && wall < 10.0,
          "200 states, max diff vs LQR " + fmt(worst, 3) + " (<= 1e-6), zero-error steer " + fmt(zero, 3) +
              ", co-scaling drift " + fmt(worst_scale, 3) + " (<= 1e-9), " + fmt(wall, 3) + " s (< 10)"};
}

harness::ExperimentConfig curved_config(std::uint64_t seed) {
  harness::ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.scenario = sim::ScenarioId::kCurvedRoad;
  cfg.schedule.protocol = harness::Protocol::kSections;
  return cfg;
}

// 10. Curved road sections.
Verdict curved_road() {
  const auto t0 = Clock::now();
  const World w = build_world(curved_config(1));
  const auto il_run = run_method(w, harness::Method::kIl);
  const auto llpl_run = run_method(w, harness::Method::kLlpl);
  const auto a = rmse_series(llpl_run), b = rmse_series(il_run);
  auto out = table("c10_sections.csv", "section,speed,il_rmse,llpl_rmse,il_off_path,llpl_off_path");
  for (std::size_t i = 0; i < a.size(); ++i) {
    out << llpl_run.summary.epochs[i].label << ',' << w.cfg.schedule.section_speeds[i] << ',' << b[i] << ','
        << a[i] << ',' << il_run.summary.epochs[i].off_path << ',' << llpl_run.summary.epochs[i].off_path << '\n';
  }
  const double red2 = 1.0 - a[1] / b[1], red3 = 1.0 - a[2] / b[2];
  bool on_path = true;
  for (std::size_t i = 3; i <= 5; ++i) on_path = on_path && !llpl_run.summary.epochs[i].off_path;
  const double wall = seconds_since(t0);
  return {red2 >= 0.3 && red3 >= 0.3 && on_path && wall < 1800.0,
          "S1-S7 il " + series(b) + " mm, llpl " + series(a) + " mm; S2 reduction " + fmt(100 * red2, 3) +
              "%, S3 " + fmt(100 * red3, 3) + "% (>= 30%), S4-S6 " + (on_path ? "on path" : "left the path") +
              ", " + fmt(wall, 3) + " s (< 1800)"};
}

// 11. Training on noise-corrupted measurements.
Verdict noise_replay() {
  const auto t0 = Clock::now();
  auto out = table("c11_noise.csv", "seed,il_noisy,llpl_noisy");
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto cfg = revisit_config(seed, 6);
    cfg.noise.sigma_vy = 0.05;
    cfg.noise.sigma_yaw_rate = 0.01;
    const sim::DrivingLog clean = il::generate_demonstration(cfg.vehicle, cfg.sim, cfg.demo, cfg.seed);
    World w;
    w.cfg = cfg;
    w.demo = harness::demo_from_log(cfg, harness::corrupt_log(clean, cfg.noise, cfg.seed * 7919ULL));
    w.trained = harness::train_policy(cfg, w.demo);
    const double il_final = rmse_series(run_method(w, harness::Method::kIl)).back();
    const double llpl_final = rmse_series(run_method(w, harness::Method::kLlpl)).back();
    out << seed << ',' << il_final << ',' << llpl_final << '\n';
    pass = pass && llpl_final <= il_final;
    detail += "seed " + std::to_string(seed) + " il/llpl " + series({il_final, llpl_final}) + " mm; ";
  }
  const double wall = seconds_since(t0);
  return {pass && wall < 900.0, detail + fmt(wall, 3) + " s (< 900)"};
}

// 12. RL baseline sanity.
Verdict rl_sanity() {
  const auto t0 = Clock::now();
  const World w = build_world(curved_config(1));

  // One-state MDP: the critic's fixed point is r / (1 - gamma).
  baselines::RlConfig mdp;
  mdp.gamma = 0.5;
  mdp.tau_target = 0.1;
  mdp.critic_lr = 1e-2;
  auto ac = baselines::ActorCritic::from_policy(w.trained.policy, mdp, w.cfg.vehicle.steer_limit, 11);
  baselines::Transition t;
  t.state << 12.0, 0.0, 0.0, 0.0, 0.0;
  t.next_state = t.state;
  t.reward = -1.0;
  t.steer = ac.actor.model.forward_batch(w.trained.policy.normalizer.apply(t.state))(0, 0);
  const std::vector<baselines::Transition> one{t};
  const auto batch = baselines::make_transition_batch(one, {0}, w.trained.policy.normalizer);
  for (int k = 0; k < 1000; ++k) baselines::rl_critic_update(ac, batch, mdp);
  const double q = ac.critic.forward_batch(ac.critic_inputs(batch.states, batch.steer))(0, 0);
  const double fixed_point = t.reward / (1.0 - mdp.gamma);
  const bool critic_ok = std::abs(q - fixed_point) <= 0.1 * std::abs(fixed_point);

  // Warm-up actor updates on demonstration transitions, from an untrained actor.
  const baselines::RlConfig rl = w.cfg.rl;
  auto warm = baselines::ActorCritic::from_policy(w.trained.untrained, rl, w.cfg.vehicle.steer_limit, 12);
  const auto transitions =
      baselines::demonstration_transitions(w.demo.log, w.cfg.sim.window_steps(), w.cfg.extract);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> pick(0, transitions.size() - 1);
  auto draw = [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    return baselines::make_transition_batch(transitions, idx, warm.actor.normalizer);
  };
  const auto eval = draw(1024);
  auto bc_loss = [&] { return nn::mse_loss(warm.actor.model, eval.states, eval.steer); };
  const double before = bc_loss();
  for (int k = 0; k < rl.updates_per_section; ++k) baselines::rl_actor_update(warm, draw(rl.batch_size), 0.0, rl);
  const double after = bc_loss();
  const bool warmup_ok = after < before;

  // Full section schedule.
  auto run = run_method(w, harness::Method::kRl);
  bool finite = !run.non_finite;
  std::size_t off = 0;
  for (const auto& e : run.summary.epochs) {
    finite = finite && std::isfinite(e.metrics.rmse_e_lat) && std::isfinite(e.metrics.control_effort);
    off += e.off_path ? 1 : 0;
  }
  const bool complete = run.summary.epochs.size() == w.cfg.schedule.section_speeds.size();
  auto out = table("c12_rl_sections.csv", "section,rmse_e_lat,off_path,update_wall_s");
  for (const auto& e : run.summary.epochs) {
    out << e.label << ',' << e.metrics.rmse_e_lat << ',' << e.off_path << ',' << e.update_wall_s << '\n';
  }
  return {critic_ok && warmup_ok && finite && complete,
          "MDP Q " + fmt(q, 4) + " vs " + fmt(fixed_point, 4) + " (10%), warm-up BC loss " + fmt(before, 3) +
              " -> " + fmt(after, 3) + ", schedule " + std::to_string(run.summary.epochs.size()) + "/" +
              std::to_string(w.cfg.schedule.section_speeds.size()) + " sections, " +
              (finite ? "finite" : "non-finite") + ", " + std::to_string(off) + " off-path sections (not gated), " +
              fmt(seconds_since(t0), 3) + " s"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  std::string work = "acceptance_work";
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  app.add_option("--work", work, "Directory for detail tables");
  CLI11_PARSE(app, argc, argv);

  log::set_level(log::Level::kError);
  g_work = work;
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria{
      {1, "gradient exactness", gradients},
      {2, "A-GEM projection", agem},
      {3, "screening and memory", screening},
      {4, "inverse-dynamics IL", inverse_dynamics},
      {5, "revisit improvement", revisit},
      {6, "six-epoch comparison", six_epochs},
      {7, "memory-growth decay", memory_growth},
      {8, "update budget", update_budget},
      {9, "MPC core", mpc_core},
      {10, "curved-road protocol", curved_road},
      {11, "noise-replay robustness", noise_replay},
      {12, "RL baseline sanity", rl_sanity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("criterion %2d %s  %s: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
    std::ofstream(g_work / ("c" + std::to_string(c.id) + ".txt")) << (v.pass ? "PASS " : "FAIL ") << v.detail
                                                                   << '\n';
  }
  return failures == 0 ? 0 : 1;
}
