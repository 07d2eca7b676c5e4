#include "llpl/il/policy.hpp"

#include "llpl/error.hpp"
#include "llpl/nn/checkpoint.hpp"

namespace llpl::il {

Policy Policy::create(std::uint64_t seed) {
  return Policy{nn::MlpModel::glorot({5, 64, 64, 1}, nn::Activation::kTanh, seed),
                nn::Normalizer::identity(kFeatureDim)};
}

double Policy::raw_steer(const StateFeatures& state, const sim::TransitionFeatures& target) const {
  const Eigen::MatrixXd x = normalizer.apply(feature_vector(state, target));
  return model.forward_batch(x)(0, 0);
}

double Policy::act(const sim::VehicleState& state, const sim::TransitionFeatures& target,
                   double prev_steer, const sim::VehicleParams& params, double period) const {
  const double steer = sim::clip_steer(raw_steer(state_features(state), target), params);
  return sim::rate_limit_steer(steer, prev_steer, params, period);
}

double Policy::act(const sim::VehicleState& state, const sim::ReferencePath& path, double station,
                   double prev_steer, const sim::VehicleParams& params,
                   const sim::SimConfig& cfg) const {
  const auto target = sim::lookahead_target(state, path, station, cfg.horizon_window);
  return act(state, target, prev_steer, params, cfg.control_period);
}

void Policy::save(const std::filesystem::path& file) const {
  nn::write_checkpoint(file, model, &normalizer);
}

Policy Policy::load(const std::filesystem::path& file) {
  auto ck = nn::read_checkpoint(file);
  if (!ck.normalizer) throw Error(ErrorKind::kIo, "policy checkpoint lacks a normalizer: " + file.string());
  return Policy{std::move(ck.model), std::move(*ck.normalizer)};
}

sim::Controller make_controller(const Policy& policy, const sim::VehicleParams& params,
                                const sim::SimConfig& cfg) {
  return [&policy, params, cfg](const sim::ControlContext& ctx) {
    return policy.act(ctx.state, ctx.path, ctx.error.station, ctx.prev_steer, params, cfg);
  };
}

}  // namespace llpl::il
