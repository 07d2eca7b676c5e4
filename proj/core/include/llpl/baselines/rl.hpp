#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/lifelong/loop.hpp"
#include "llpl/nn/mlp.hpp"
#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"

namespace llpl::baselines {

struct RlConfig {
  double gamma = 0.99;
  double lambda_pg = 0.05;
  double tau_target = 0.005;
  double noise_frac = 0.10;  // exploration std as a fraction of steer_limit
  int warmup_sections = 2;
  std::vector<std::size_t> critic_hidden{128, 128, 128, 128};
  std::size_t batch_size = 64;
  int updates_per_section = 300;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;

  /// Throws Error(kConfig).
  void validate() const;
};

/// One step of experience. States are raw policy features.
struct Transition {
  Eigen::Matrix<double, 5, 1> state;
  double steer = 0.0;
  double reward = 0.0;
  Eigen::Matrix<double, 5, 1> next_state;
};

/// Normalized minibatch: states are columns in the policy's normalized space.
struct TransitionBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd next_states;
  Eigen::RowVectorXd steer;
  Eigen::RowVectorXd reward;
};

/// Actor initialized from an IL policy, relu critic on (state, steer), and
/// their target copies. The critic sees steer / steer_scale.
struct ActorCritic {
  il::Policy actor;
  il::Policy actor_target;
  nn::MlpModel critic;
  nn::MlpModel critic_target;
  double steer_scale = 0.5;

  static ActorCritic from_policy(const il::Policy& policy, const RlConfig& cfg, double steer_limit,
                                 std::uint64_t seed);

  /// Stacks normalized states over scaled steers (6 x N).
  Eigen::MatrixXd critic_inputs(const Eigen::MatrixXd& states, const Eigen::RowVectorXd& steer) const;
};

TransitionBatch make_transition_batch(const std::vector<Transition>& transitions,
                                      const std::vector<std::size_t>& index,
                                      const nn::Normalizer& normalizer);

/// Squared TD error mean (Q(s, a) - y)^2 against fixed targets y, with its
/// gradient in critic parameters.
nn::LossAndGradient critic_loss_and_gradient(const nn::MlpModel& critic,
                                             const Eigen::MatrixXd& critic_inputs,
                                             const Eigen::RowVectorXd& targets);

/// L = mean (pi(s) - steer)^2 - lambda * mean Q(s, pi(s)), differentiated in
/// actor parameters through the frozen critic.
nn::LossAndGradient actor_loss_and_gradient(const nn::MlpModel& actor, const nn::MlpModel& critic,
                                            const Eigen::MatrixXd& states,
                                            const Eigen::RowVectorXd& steer, double lambda_pg,
                                            double steer_scale);

/// TD targets r + gamma * Q'(s', pi'(s')).
Eigen::RowVectorXd td_targets(const ActorCritic& ac, const TransitionBatch& batch, double gamma);

/// One SGD step on the squared TD error, then a soft update of the critic
/// target. Returns the pre-step loss; a non-finite loss skips the step.
double rl_critic_update(ActorCritic& ac, const TransitionBatch& batch, const RlConfig& cfg);

/// One SGD step on the behavior-cloning plus policy-gradient loss, then a soft
/// update of the actor target. Returns the pre-step loss; a non-finite loss
/// skips the step.
double rl_actor_update(ActorCritic& ac, const TransitionBatch& batch, double lambda_pg,
                       const RlConfig& cfg);

/// Consecutive kept demonstration windows as transitions. Realized
/// transitions carry no tracking error, so the reward is -steer^2.
std::vector<Transition> demonstration_transitions(const sim::DrivingLog& log, int window_steps,
                                                  const il::ExtractOptions& options);

struct RlLegOutcome {
  std::string label;
  sim::DrivingLog log;
  bool off_path = false;
  bool updated = false;
  double lambda_pg = 0.0;
  double critic_loss = 0.0;  // mean over the update's steps
  double actor_loss = 0.0;
  std::size_t replay_size = 0;
  double update_wall_s = 0.0;
};

struct RlResult {
  std::vector<RlLegOutcome> legs;
  il::Policy final_actor;
  std::size_t restarts = 0;
  bool non_finite = false;  // some update step produced a non-finite loss
};

/// Demonstration-initialized actor-critic fine-tuning over a schedule. Acts
/// with Gaussian exploration noise; after every leg with an update trigger,
/// runs updates_per_section critic and actor steps on minibatches drawn from
/// the demonstration and all execution transitions so far. The first
/// warmup_sections updates use lambda = 0.
RlResult run_rl_baseline(const il::Policy& initial, const sim::DrivingLog& demonstration,
                         const lifelong::Environment& env, const lifelong::Schedule& schedule,
                         const RlConfig& cfg, std::uint64_t seed);

}  // namespace llpl::baselines
