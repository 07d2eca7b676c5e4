#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llpl/il/sample.hpp"
#include "llpl/nn/mlp.hpp"
#include "llpl/nn/normalizer.hpp"

namespace llpl::il {

enum class Optimizer { kSgd, kAdam };

Optimizer parse_optimizer(const std::string& name);
std::string to_string(Optimizer o);

struct TrainOptions {
  int epochs = 100;
  std::size_t batch_size = 64;
  Optimizer optimizer = Optimizer::kAdam;
  double lr = 1e-3;
  std::uint64_t seed = 1;
};

struct TrainReport {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // full-dataset MSE after each epoch
  double wall_s = 0.0;

  double final_loss() const { return epoch_loss.empty() ? initial_loss : epoch_loss.back(); }
};

/// Normalized network inputs and steer targets of a sample set.
struct Batch {
  Eigen::MatrixXd inputs;   // kFeatureDim x N, normalized
  Eigen::MatrixXd targets;  // 1 x N
};

Batch make_batch(const std::vector<Sample>& samples, const nn::Normalizer& normalizer);

/// Minibatch SGD or Adam on the steer MSE over normalized features. On a non-finite
/// loss the model is rolled back to the end of the last finite epoch and
/// Error(kNonFiniteLoss) is thrown. Throws Error(kEmptyDataset) on no data.
TrainReport train_il(nn::MlpModel& model, const Dataset& data, const nn::Normalizer& normalizer,
                     const TrainOptions& options);

/// Picks the columns listed in `index` from a batch.
Batch gather(const Batch& all, const std::vector<Eigen::Index>& index, std::size_t begin,
             std::size_t end);

}  // namespace llpl::il
