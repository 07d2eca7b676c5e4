#include "fixtures.hpp"

#include "llpl/il/demonstration.hpp"
#include "llpl/il/train.hpp"

namespace llpl::testing {

const SmallWorld& small_world() {
  static const SmallWorld world = [] {
    SmallWorld w;
    il::DemoOptions opt;
    opt.speeds = {8.0, 14.0};
    opt.duration_per_speed = 60.0;
    w.demo_log = il::generate_demonstration(w.params, w.sim, opt, 3);
    w.demo = il::extract_samples(w.demo_log, w.sim.window_steps());
    w.normalizer = nn::Normalizer::fit(il::feature_matrix(w.demo.samples));
    w.policy = il::Policy::create(3);
    w.policy.normalizer = w.normalizer;
    il::TrainOptions t;
    t.epochs = 30;
    t.seed = 3;
    il::train_il(w.policy.model, w.demo, w.normalizer, t);
    return w;
  }();
  return world;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("llpl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace llpl::testing
