#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "llpl/error.hpp"
#include "llpl/il/policy.hpp"
#include "llpl/nn/checkpoint.hpp"
#include "llpl/sim/scenario.hpp"

using namespace llpl;

TEST_CASE("policy shape and seeded creation") {
  const auto p = il::Policy::create(4);
  CHECK(p.model.layer_sizes() == std::vector<std::size_t>{5, 64, 64, 1});
  CHECK(p.model.activation() == nn::Activation::kTanh);
  CHECK(p.normalizer.dim() == 5);
  CHECK(il::Policy::create(4).model.flatten() == p.model.flatten());
}

TEST_CASE("raw steer runs the normalized feature vector through the network") {
  const auto& w = testing::small_world();
  const il::StateFeatures s{12.0, 0.1, 0.05};
  const sim::TransitionFeatures t{0.3, 0.02};
  const Eigen::MatrixXd x = w.normalizer.apply(il::feature_vector(s, t));
  const std::vector<double> col(x.data(), x.data() + 5);
  CHECK(w.policy.raw_steer(s, t) == doctest::Approx(w.policy.model.forward(col)(0)).epsilon(1e-15));
}

TEST_CASE("act clips to the steer limit and then rate limits") {
  auto p = il::Policy::create(1);
  p.model.bias(p.model.layer_count() - 1)(0) = 5.0;
  p.model.weight(p.model.layer_count() - 1).setZero();
  sim::VehicleParams params;
  sim::VehicleState s;
  s.vx = 10.0;
  CHECK(p.act(s, sim::TransitionFeatures{}, 0.45, params, 0.1) == doctest::Approx(0.5));
  CHECK(p.act(s, sim::TransitionFeatures{}, 0.0, params, 0.1) == doctest::Approx(0.1));
}

TEST_CASE("trained policy steers toward a target on the left") {
  const auto& w = testing::small_world();
  sim::VehicleState s;
  s.vx = 10.0;
  const double left = w.policy.act(s, sim::TransitionFeatures{0.3, 0.03}, 0.0, w.params, 1.0);
  const double right = w.policy.act(s, sim::TransitionFeatures{-0.3, -0.03}, 0.0, w.params, 1.0);
  CHECK(left > 0.0);
  CHECK(right < 0.0);
}

TEST_CASE("policy checkpoints keep the normalizer") {
  const auto& w = testing::small_world();
  const auto dir = testing::scratch_dir("policy");
  w.policy.save(dir / "p.ckpt");
  const auto back = il::Policy::load(dir / "p.ckpt");
  CHECK(back.model.flatten() == w.policy.model.flatten());
  CHECK(back.normalizer.mean == w.policy.normalizer.mean);
  CHECK(back.normalizer.std == w.policy.normalizer.std);

  nn::write_checkpoint(dir / "bare.ckpt", w.policy.model);
  CHECK_THROWS_AS(il::Policy::load(dir / "bare.ckpt"), Error);
}

TEST_CASE("controller drives the double lane change") {
  const auto& w = testing::small_world();
  const auto path = sim::make_double_lane_change();
  const auto ctl = il::make_controller(w.policy, w.params, w.sim);
  const auto r = sim::run_leg(path, {0.0, path.length(), 10.0}, sim::state_on_path(path, 0.0, 10.0), 0.0,
                              0.0, 0.0, ctl, w.params, w.sim);
  CHECK_FALSE(r.off_path);
  double worst = 0.0;
  for (const auto& rec : r.log.records) worst = std::max(worst, std::abs(rec.e_lat));
  CHECK(worst < 1.0);
}
