#include "llpl/il/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::il {

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "adam") return Optimizer::kAdam;
  throw Error(ErrorKind::kConfig, "unknown optimizer '" + name + "'");
}

std::string to_string(Optimizer o) { return o == Optimizer::kSgd ? "sgd" : "adam"; }

Batch make_batch(const std::vector<Sample>& samples, const nn::Normalizer& normalizer) {
  return Batch{normalizer.apply(feature_matrix(samples)), steer_matrix(samples)};
}

Batch gather(const Batch& all, const std::vector<Eigen::Index>& index, std::size_t begin,
             std::size_t end) {
  const auto n = static_cast<Eigen::Index>(end - begin);
  Batch b{Eigen::MatrixXd(all.inputs.rows(), n), Eigen::MatrixXd(all.targets.rows(), n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = index[begin + static_cast<std::size_t>(j)];
    b.inputs.col(j) = all.inputs.col(src);
    b.targets.col(j) = all.targets.col(src);
  }
  return b;
}

TrainReport train_il(nn::MlpModel& model, const Dataset& data, const nn::Normalizer& normalizer,
                     const TrainOptions& options) {
  if (data.empty()) throw Error(ErrorKind::kEmptyDataset, "training set is empty");
  if (options.batch_size == 0) throw Error(ErrorKind::kConfig, "batch_size must be positive");
  const auto t0 = std::chrono::steady_clock::now();

  const Batch all = make_batch(data.samples, normalizer);
  const auto n = static_cast<std::size_t>(all.inputs.cols());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(options.seed);

  TrainReport report;
  report.initial_loss = nn::mse_loss(model, all.inputs, all.targets);
  Eigen::VectorXd last_good = model.flatten();
  nn::AdamState adam(model.parameter_count());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    try {
      for (std::size_t b = 0; b < n; b += options.batch_size) {
        const Batch mb = gather(all, order, b, std::min(n, b + options.batch_size));
        const auto lg = nn::backward_mse(model, mb.inputs, mb.targets);
        if (options.optimizer == Optimizer::kAdam) {
          adam.step(model, lg.grad, options.lr);
        } else {
          nn::sgd_step(model, lg.grad, options.lr);
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNonFiniteLoss) throw;
      model.load(last_good);
      throw;
    }
    const double loss = nn::mse_loss(model, all.inputs, all.targets);
    if (!std::isfinite(loss)) {
      model.load(last_good);
      throw Error(ErrorKind::kNonFiniteLoss, "training diverged at epoch " + std::to_string(epoch));
    }
    last_good = model.flatten();
    report.epoch_loss.push_back(loss);
    log::debug("train_il epoch " + std::to_string(epoch) + " loss " + std::to_string(loss));
  }
  report.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace llpl::il
