#include "llpl/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "llpl/error.hpp"

namespace llpl::nn {

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw Error(ErrorKind::kConfig, "unknown activation '" + name + "'");
}

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  if (layer_sizes_.size() < 2) {
    throw Error(ErrorKind::kShapeMismatch, "an MLP needs at least an input and an output layer");
  }
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const auto n_in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto n_out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    if (n_in == 0 || n_out == 0) throw Error(ErrorKind::kShapeMismatch, "zero-width layer");
    weights_.push_back(RowMatrix::Zero(n_out, n_in));
    biases_.push_back(Eigen::VectorXd::Zero(n_out));
    parameter_count_ += n_in * n_out + n_out;
  }
}

MlpModel MlpModel::glorot(std::vector<std::size_t> layer_sizes, Activation activation,
                          std::uint64_t seed) {
  MlpModel m(std::move(layer_sizes), activation);
  std::mt19937_64 rng(seed);
  for (auto& w : m.weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  }
  return m;
}

void MlpModel::check_input_rows(Eigen::Index rows) const {
  if (rows != static_cast<Eigen::Index>(input_size())) {
    throw Error(ErrorKind::kShapeMismatch, "input has " + std::to_string(rows) +
                                               " features, model expects " +
                                               std::to_string(input_size()));
  }
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) {
    z = z.array().tanh();
  } else {
    z = z.cwiseMax(0.0);
  }
}

}  // namespace

Eigen::VectorXd MlpModel::forward(std::span<const double> input) const {
  check_input_rows(static_cast<Eigen::Index>(input.size()));
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  return forward_batch(x).col(0);
}

Eigen::MatrixXd MlpModel::forward_batch(const Eigen::MatrixXd& inputs) const {
  check_input_rows(inputs.rows());
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) activate(z, activation_);
    a = std::move(z);
  }
  return a;
}

GradientVector MlpModel::backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& output_grads,
                                  Eigen::MatrixXd* input_grads) const {
  check_input_rows(inputs.rows());
  if (output_grads.rows() != static_cast<Eigen::Index>(output_size()) ||
      output_grads.cols() != inputs.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "output gradient shape does not match the batch");
  }

  const std::size_t layers = weights_.size();
  // activations[0] = inputs, activations[l] = output of layer l.
  std::vector<Eigen::MatrixXd> activations(layers + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = weights_[l] * activations[l];
    z.colwise() += biases_[l];
    if (l + 1 < layers) activate(z, activation_);
    activations[l + 1] = std::move(z);
  }

  Eigen::VectorXd grad(parameter_count_);
  // Offsets of each layer's block in flat order.
  std::vector<Eigen::Index> offset(layers);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offset[l] = pos;
    pos += weights_[l].size() + biases_[l].size();
  }

  Eigen::MatrixXd delta = output_grads;
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::Index nw = weights_[l].size();
    Eigen::Map<RowMatrix> dw(grad.data() + offset[l], weights_[l].rows(), weights_[l].cols());
    dw.noalias() = delta * activations[l].transpose();
    grad.segment(offset[l] + nw, biases_[l].size()) = delta.rowwise().sum();

    if (l == 0 && input_grads == nullptr) break;
    Eigen::MatrixXd back = weights_[l].transpose() * delta;
    if (l > 0) {
      const Eigen::MatrixXd& a = activations[l];
      if (activation_ == Activation::kTanh) {
        back.array() *= 1.0 - a.array().square();
      } else {
        back.array() *= (a.array() > 0.0).cast<double>();
      }
    }
    delta = std::move(back);
  }
  if (input_grads) *input_grads = std::move(delta);
  return GradientVector(std::move(grad));
}

Eigen::VectorXd MlpModel::flatten() const {
  Eigen::VectorXd out(parameter_count_);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.segment(pos, weights_[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    pos += weights_[l].size();
    out.segment(pos, biases_[l].size()) = biases_[l];
    pos += biases_[l].size();
  }
  return out;
}

void MlpModel::load(const Eigen::VectorXd& params) {
  if (params.size() != parameter_count_) {
    throw Error(ErrorKind::kShapeMismatch, "parameter vector has " + std::to_string(params.size()) +
                                               " entries, model has " +
                                               std::to_string(parameter_count_));
  }
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) =
        params.segment(pos, weights_[l].size());
    pos += weights_[l].size();
    biases_[l] = params.segment(pos, biases_[l].size());
    pos += biases_[l].size();
  }
}

void MlpModel::axpy(double scale, const Eigen::VectorXd& delta) {
  if (delta.size() != parameter_count_) {
    throw Error(ErrorKind::kShapeMismatch, "update vector length does not match the model");
  }
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) +=
        scale * delta.segment(pos, weights_[l].size());
    pos += weights_[l].size();
    biases_[l] += scale * delta.segment(pos, biases_[l].size());
    pos += biases_[l].size();
  }
}

LossAndGradient backward_mse(const MlpModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& targets) {
  if (inputs.cols() == 0) throw Error(ErrorKind::kShapeMismatch, "empty batch");
  if (targets.cols() != inputs.cols() ||
      targets.rows() != static_cast<Eigen::Index>(model.output_size())) {
    throw Error(ErrorKind::kShapeMismatch, "targets do not match the batch");
  }
  const double n = static_cast<double>(inputs.cols());
  const Eigen::MatrixXd residual = model.forward_batch(inputs) - targets;
  LossAndGradient out;
  out.loss = residual.squaredNorm() / n;
  if (!std::isfinite(out.loss)) throw Error(ErrorKind::kNonFiniteLoss, "MSE loss is not finite");
  out.grad = model.backward(inputs, (2.0 / n) * residual);
  return out;
}

double mse_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets) {
  if (inputs.cols() == 0) throw Error(ErrorKind::kShapeMismatch, "empty batch");
  return (model.forward_batch(inputs) - targets).squaredNorm() / static_cast<double>(inputs.cols());
}

void sgd_step(MlpModel& model, const GradientVector& grad, double lr) {
  if (!(lr > 0.0)) throw Error(ErrorKind::kConfig, "learning rate must be positive");
  model.axpy(-lr, grad.values);
}

AdamState::AdamState(Eigen::Index parameter_count, double beta1, double beta2, double epsilon)
    : m_(Eigen::VectorXd::Zero(parameter_count)),
      v_(Eigen::VectorXd::Zero(parameter_count)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon) {}

void AdamState::step(MlpModel& model, const GradientVector& grad, double lr) {
  if (grad.size() != m_.size()) throw Error(ErrorKind::kShapeMismatch, "Adam state does not match the gradient");
  if (!(lr > 0.0)) throw Error(ErrorKind::kConfig, "learning rate must be positive");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad.values;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.values.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const Eigen::VectorXd update =
      (m_ / c1).array() / ((v_ / c2).array().sqrt() + eps_);
  model.axpy(-lr, update);
}

void soft_update(MlpModel& target, const MlpModel& source, double tau) {
  if (target.parameter_count() != source.parameter_count()) {
    throw Error(ErrorKind::kShapeMismatch, "soft update between differently shaped models");
  }
  if (tau == 1.0) {
    target.load(source.flatten());
    return;
  }
  if (tau == 0.0) return;
  target.load(tau * source.flatten() + (1.0 - tau) * target.flatten());
}

}  // namespace llpl::nn
