#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace llpl::nn {

enum class Activation { kTanh, kRelu };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Flat gradient in the canonical parameter order of its model.
struct GradientVector {
  Eigen::VectorXd values;

  GradientVector() = default;
  explicit GradientVector(Eigen::VectorXd v) : values(std::move(v)) {}
  static GradientVector zeros(Eigen::Index n) { return GradientVector(Eigen::VectorXd::Zero(n)); }

  Eigen::Index size() const { return values.size(); }
  double dot(const GradientVector& other) const { return values.dot(other.values); }
  double squared_norm() const { return values.squaredNorm(); }
  bool all_finite() const { return values.allFinite(); }
};

/// Dense feed-forward network. Hidden layers use the configured activation,
/// the output layer is linear. Samples are laid out column-wise
/// (features x batch).
///
/// Flat parameter order: for each layer in turn, the weight matrix
/// (n_out x n_in) row-major, then the bias vector.
class MlpModel {
 public:
  MlpModel() = default;
  /// Zero-initialized network.
  MlpModel(std::vector<std::size_t> layer_sizes, Activation activation);

  /// Uniform(-sqrt(6/(n_in+n_out)), +sqrt(6/(n_in+n_out))) weights, zero biases.
  static MlpModel glorot(std::vector<std::size_t> layer_sizes, Activation activation,
                         std::uint64_t seed);

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  std::size_t input_size() const { return layer_sizes_.front(); }
  std::size_t output_size() const { return layer_sizes_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  Eigen::Index parameter_count() const { return parameter_count_; }

  RowMatrix& weight(std::size_t layer) { return weights_[layer]; }
  const RowMatrix& weight(std::size_t layer) const { return weights_[layer]; }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_[layer]; }

  /// Single-sample forward pass. Throws Error(kShapeMismatch).
  Eigen::VectorXd forward(std::span<const double> input) const;
  /// Batched forward pass on a features x batch matrix.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  /// Reverse pass for an arbitrary loss: given dL/d(output) per sample
  /// (n_out x batch), returns dL/d(params). If input_grads is non-null it
  /// receives dL/d(inputs) (n_in x batch).
  GradientVector backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& output_grads,
                          Eigen::MatrixXd* input_grads = nullptr) const;

  /// clone_params: the canonical flat parameter vector.
  Eigen::VectorXd flatten() const;
  /// load_params: inverse of flatten. Throws Error(kShapeMismatch).
  void load(const Eigen::VectorXd& params);

  /// params += scale * delta, in flat order.
  void axpy(double scale, const Eigen::VectorXd& delta);

 private:
  void check_input_rows(Eigen::Index rows) const;

  std::vector<std::size_t> layer_sizes_;
  Activation activation_ = Activation::kTanh;
  std::vector<RowMatrix> weights_;
  std::vector<Eigen::VectorXd> biases_;
  Eigen::Index parameter_count_ = 0;
};

struct LossAndGradient {
  double loss = 0.0;
  GradientVector grad;
};

/// loss = (1/N) sum_k ||f(x_k) - t_k||^2 with its exact gradient.
/// Throws Error(kShapeMismatch) or Error(kNonFiniteLoss).
LossAndGradient backward_mse(const MlpModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& targets);

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets);

/// params <- params - lr * grad. Throws Error(kShapeMismatch) or Error(kConfig) for lr <= 0.
void sgd_step(MlpModel& model, const GradientVector& grad, double lr);

/// Adam moment estimates for one model. Used for offline training only; the
/// lifelong updates take plain SGD steps on projected gradients.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(Eigen::Index parameter_count, double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);

  void step(MlpModel& model, const GradientVector& grad, double lr);
  long steps() const { return t_; }

 private:
  Eigen::VectorXd m_, v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

/// target <- tau * source + (1 - tau) * target.
void soft_update(MlpModel& target, const MlpModel& source, double tau);

}  // namespace llpl::nn
