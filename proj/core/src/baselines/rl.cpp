#include "llpl/baselines/rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::baselines {

void RlConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::kConfig, "rl gamma must lie in (0, 1)");
  if (!(lambda_pg >= 0.0)) throw Error(ErrorKind::kConfig, "rl lambda_pg must be non-negative");
  if (!(tau_target >= 0.0 && tau_target <= 1.0)) {
    throw Error(ErrorKind::kConfig, "rl tau_target must lie in [0, 1]");
  }
  if (!(noise_frac >= 0.0)) throw Error(ErrorKind::kConfig, "rl noise_frac must be non-negative");
  if (warmup_sections < 0) throw Error(ErrorKind::kConfig, "rl warmup_sections must be >= 0");
  if (critic_hidden.empty()) throw Error(ErrorKind::kConfig, "rl critic needs hidden layers");
  if (batch_size == 0) throw Error(ErrorKind::kConfig, "rl batch_size must be positive");
  if (updates_per_section < 0) throw Error(ErrorKind::kConfig, "rl updates_per_section must be >= 0");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw Error(ErrorKind::kConfig, "rl learning rates must be positive");
  }
}

ActorCritic ActorCritic::from_policy(const il::Policy& policy, const RlConfig& cfg,
                                     double steer_limit, std::uint64_t seed) {
  ActorCritic ac;
  ac.actor = policy;
  ac.actor_target = policy;
  std::vector<std::size_t> sizes{static_cast<std::size_t>(il::kFeatureDim) + 1};
  sizes.insert(sizes.end(), cfg.critic_hidden.begin(), cfg.critic_hidden.end());
  sizes.push_back(1);
  ac.critic = nn::MlpModel::glorot(sizes, nn::Activation::kRelu, seed);
  ac.critic_target = ac.critic;
  ac.steer_scale = steer_limit;
  return ac;
}

Eigen::MatrixXd ActorCritic::critic_inputs(const Eigen::MatrixXd& states,
                                           const Eigen::RowVectorXd& steer) const {
  Eigen::MatrixXd in(states.rows() + 1, states.cols());
  in.topRows(states.rows()) = states;
  in.bottomRows(1) = steer / steer_scale;
  return in;
}

TransitionBatch make_transition_batch(const std::vector<Transition>& transitions,
                                      const std::vector<std::size_t>& index,
                                      const nn::Normalizer& normalizer) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd s(il::kFeatureDim, n), s2(il::kFeatureDim, n);
  TransitionBatch b;
  b.steer.resize(n);
  b.reward.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = transitions.at(index[static_cast<std::size_t>(j)]);
    s.col(j) = t.state;
    s2.col(j) = t.next_state;
    b.steer(j) = t.steer;
    b.reward(j) = t.reward;
  }
  b.states = normalizer.apply(s);
  b.next_states = normalizer.apply(s2);
  return b;
}

nn::LossAndGradient critic_loss_and_gradient(const nn::MlpModel& critic,
                                             const Eigen::MatrixXd& critic_inputs,
                                             const Eigen::RowVectorXd& targets) {
  return nn::backward_mse(critic, critic_inputs, targets);
}

nn::LossAndGradient actor_loss_and_gradient(const nn::MlpModel& actor, const nn::MlpModel& critic,
                                            const Eigen::MatrixXd& states,
                                            const Eigen::RowVectorXd& steer, double lambda_pg,
                                            double steer_scale) {
  const Eigen::Index n = states.cols();
  if (steer.size() != n) throw Error(ErrorKind::kShapeMismatch, "actor batch size mismatch");
  const Eigen::RowVectorXd a = actor.forward_batch(states).row(0);
  const Eigen::RowVectorXd resid = a - steer;
  nn::LossAndGradient out;
  out.loss = resid.squaredNorm() / static_cast<double>(n);
  Eigen::MatrixXd d_out = 2.0 * resid / static_cast<double>(n);

  if (lambda_pg != 0.0) {
    Eigen::MatrixXd cin(states.rows() + 1, n);
    cin.topRows(states.rows()) = states;
    cin.bottomRows(1) = a / steer_scale;
    const Eigen::RowVectorXd q = critic.forward_batch(cin).row(0);
    out.loss -= lambda_pg * q.mean();
    Eigen::MatrixXd in_grad;
    critic.backward(cin, Eigen::MatrixXd::Ones(1, n), &in_grad);
    d_out -= (lambda_pg / static_cast<double>(n) / steer_scale) * in_grad.bottomRows(1);
  }
  if (!std::isfinite(out.loss)) throw Error(ErrorKind::kNonFiniteLoss, "actor loss is not finite");
  out.grad = actor.backward(states, d_out);
  return out;
}

Eigen::RowVectorXd td_targets(const ActorCritic& ac, const TransitionBatch& batch, double gamma) {
  const Eigen::RowVectorXd a2 = ac.actor_target.model.forward_batch(batch.next_states).row(0);
  const Eigen::RowVectorXd q2 =
      ac.critic_target.forward_batch(ac.critic_inputs(batch.next_states, a2)).row(0);
  return batch.reward + gamma * q2;
}

double rl_critic_update(ActorCritic& ac, const TransitionBatch& batch, const RlConfig& cfg) {
  try {
    const Eigen::RowVectorXd y = td_targets(ac, batch, cfg.gamma);
    const auto lg = critic_loss_and_gradient(ac.critic, ac.critic_inputs(batch.states, batch.steer), y);
    if (!lg.grad.all_finite()) throw Error(ErrorKind::kNonFiniteLoss, "critic gradient is not finite");
    nn::sgd_step(ac.critic, lg.grad, cfg.critic_lr);
    nn::soft_update(ac.critic_target, ac.critic, cfg.tau_target);
    return lg.loss;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFiniteLoss) throw;
    log::warn("rl_critic_update: non-finite loss, step skipped");
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double rl_actor_update(ActorCritic& ac, const TransitionBatch& batch, double lambda_pg,
                       const RlConfig& cfg) {
  try {
    const auto lg = actor_loss_and_gradient(ac.actor.model, ac.critic, batch.states, batch.steer,
                                            lambda_pg, ac.steer_scale);
    if (!lg.grad.all_finite()) throw Error(ErrorKind::kNonFiniteLoss, "actor gradient is not finite");
    nn::sgd_step(ac.actor.model, lg.grad, cfg.actor_lr);
    nn::soft_update(ac.actor_target.model, ac.actor.model, cfg.tau_target);
    return lg.loss;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFiniteLoss) throw;
    log::warn("rl_actor_update: non-finite loss, step skipped");
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::vector<Transition> demonstration_transitions(const sim::DrivingLog& log, int window_steps,
                                                  const il::ExtractOptions& options) {
  const auto starts = il::window_starts(log, window_steps, options);
  std::vector<Transition> out;
  for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
    if (starts[i + 1] != starts[i] + 1) continue;
    const il::Sample a = il::window_sample(log, starts[i], window_steps);
    const il::Sample b = il::window_sample(log, starts[i + 1], window_steps);
    Transition t;
    t.state = il::feature_vector(a.state, a.transition);
    t.next_state = il::feature_vector(b.state, b.transition);
    t.steer = a.steer;
    t.reward = -a.effort;
    out.push_back(t);
  }
  return out;
}

RlResult run_rl_baseline(const il::Policy& initial, const sim::DrivingLog& demonstration,
                         const lifelong::Environment& env, const lifelong::Schedule& schedule,
                         const RlConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (env.path == nullptr) throw Error(ErrorKind::kConfig, "environment has no path");
  const sim::ReferencePath& path = *env.path;
  const int window = env.sim.window_steps();

  ActorCritic ac = ActorCritic::from_policy(initial, cfg, env.params.steer_limit, seed);
  std::vector<Transition> replay = demonstration_transitions(demonstration, window, env.extract);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, cfg.noise_frac * env.params.steer_limit);

  RlResult result;
  sim::VehicleState state;
  double station = 0.0, steer = 0.0, t = 0.0;
  int updates_done = 0;
  bool restart = false;

  for (std::size_t i = 0; i < schedule.legs.size(); ++i) {
    const auto& sl = schedule.legs[i];
    if (sl.reset || restart) {
      station = sl.leg.start_station;
      state = sim::state_on_path(path, station, sl.leg.speed);
      steer = 0.0;
      t = 0.0;
    }
    std::vector<Eigen::Matrix<double, 5, 1>> features;
    const sim::Controller controller = [&](const sim::ControlContext& ctx) {
      const auto target =
          sim::lookahead_target(ctx.state, ctx.path, ctx.error.station, env.sim.horizon_window);
      const auto sf = il::state_features(ctx.state);
      features.push_back(il::feature_vector(sf, target));
      const double a = ac.actor.raw_steer(sf, target) + gauss(rng);
      return sim::rate_limit_steer(sim::clip_steer(a, env.params), ctx.prev_steer, env.params,
                                   env.sim.control_period);
    };
    sim::LegResult leg =
        sim::run_leg(path, sl.leg, state, station, steer, t, controller, env.params, env.sim, env.leg);
    state = leg.final_state;
    station = leg.final_station;
    steer = leg.final_steer;
    t = leg.end_time;

    const auto& rec = leg.log.records;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
      Transition tr;
      tr.state = features[k];
      tr.next_state = features[k + 1];
      tr.steer = rec[k].steer;
      // Errors after the control period reflect the action just taken.
      tr.reward = -rec[k + 1].e_lat * rec[k + 1].e_lat - rec[k + 1].e_head * rec[k + 1].e_head -
                  rec[k].steer * rec[k].steer;
      replay.push_back(tr);
    }

    RlLegOutcome out;
    out.label = sl.label;
    out.off_path = leg.off_path;
    out.log = std::move(leg.log);
    out.replay_size = replay.size();
    if (sl.update_after && !out.off_path && !replay.empty()) {
      const auto t0 = std::chrono::steady_clock::now();
      out.updated = true;
      out.lambda_pg = updates_done < cfg.warmup_sections ? 0.0 : cfg.lambda_pg;
      std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
      std::vector<std::size_t> idx(cfg.batch_size);
      double closs = 0.0, aloss = 0.0;
      for (int u = 0; u < cfg.updates_per_section; ++u) {
        for (auto& j : idx) j = pick(rng);
        const TransitionBatch batch = make_transition_batch(replay, idx, ac.actor.normalizer);
        const double c = rl_critic_update(ac, batch, cfg);
        const double a = rl_actor_update(ac, batch, out.lambda_pg, cfg);
        if (!std::isfinite(c) || !std::isfinite(a)) result.non_finite = true;
        closs += c;
        aloss += a;
      }
      const double steps = std::max(1, cfg.updates_per_section);
      out.critic_loss = closs / steps;
      out.actor_loss = aloss / steps;
      out.update_wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ++updates_done;
      log::info("rl update after " + sl.label + ": critic " + std::to_string(out.critic_loss) +
                ", actor " + std::to_string(out.actor_loss));
    }
    result.legs.push_back(std::move(out));
    restart = result.legs.back().off_path;
    if (restart && i + 1 < schedule.legs.size() && !schedule.legs[i + 1].reset) ++result.restarts;
  }
  result.final_actor = ac.actor;
  return result;
}

}  // namespace llpl::baselines
