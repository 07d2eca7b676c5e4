#pragma once

#include <Eigen/Dense>

namespace llpl::nn {

/// Per-feature standardization. std is floored at kMinStd.
struct Normalizer {
  static constexpr double kMinStd = 1e-6;

  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  /// Fits on a features x samples matrix (population std).
  static Normalizer fit(const Eigen::MatrixXd& features);
  static Normalizer identity(Eigen::Index dim);

  Eigen::Index dim() const { return mean.size(); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& normalized) const;
};

}  // namespace llpl::nn
