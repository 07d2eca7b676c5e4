#include "llpl/nn/normalizer.hpp"

#include "llpl/error.hpp"

namespace llpl::nn {

Normalizer Normalizer::fit(const Eigen::MatrixXd& features) {
  if (features.cols() == 0) throw Error(ErrorKind::kEmptyDataset, "cannot fit a normalizer on no samples");
  Normalizer n;
  n.mean = features.rowwise().mean();
  const Eigen::MatrixXd centered = features.colwise() - n.mean;
  n.std = (centered.rowwise().squaredNorm() / static_cast<double>(features.cols())).cwiseSqrt();
  n.std = n.std.cwiseMax(kMinStd);
  return n;
}

Normalizer Normalizer::identity(Eigen::Index dim) {
  Normalizer n;
  n.mean = Eigen::VectorXd::Zero(dim);
  n.std = Eigen::VectorXd::Ones(dim);
  return n;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& features) const {
  if (features.rows() != dim()) throw Error(ErrorKind::kShapeMismatch, "normalizer dimension mismatch");
  return (features.colwise() - mean).array().colwise() / std.array();
}

Eigen::MatrixXd Normalizer::invert(const Eigen::MatrixXd& normalized) const {
  if (normalized.rows() != dim()) throw Error(ErrorKind::kShapeMismatch, "normalizer dimension mismatch");
  return (normalized.array().colwise() * std.array()).matrix().colwise() + mean;
}

}  // namespace llpl::nn
