#pragma once

#include <Eigen/Core>
#include <optional>

#include "edwsvr/dataset.hpp"

namespace edwsvr {

// Per-feature affine map onto the training [min,max] range; the target gets
// the same treatment. Constant columns map to 0. Values outside the training
// range are not clipped, so the map stays affine everywhere.
struct NormalizationMap {
  Eigen::VectorXd feature_min, feature_max;  // d each
  double target_min = 0.0, target_max = 1.0;

  static NormalizationMap identity(Eigen::Index dim);

  Eigen::VectorXd apply_features(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd invert_features(const Eigen::VectorXd& scaled) const;
  double apply_target(double raw) const;
  double invert_target(double scaled) const;

  Dataset apply(const Dataset& data) const;
  Dataset invert(const Dataset& data) const;
};

NormalizationMap fit_minmax(const Dataset& train);

// Orthonormal projection onto the leading principal components of the
// training features; k is the smallest count reaching the variance threshold.
struct PcaTransform {
  Eigen::VectorXd mean;        // d
  Eigen::MatrixXd components;  // d x k, orthonormal columns, leading first
  Eigen::VectorXd eigenvalues; // k retained variances, descending
  double retained_variance_fraction = 1.0;

  Eigen::Index in_dim() const { return components.rows(); }
  Eigen::Index out_dim() const { return components.cols(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Dataset apply(const Dataset& data) const;
  // Back-projection onto the retained subspace, for reconstruction checks.
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& projected) const;
};

// Throws std::runtime_error when the training features have zero total
// variance (all rows identical). Requires n >= 2 and 0 < threshold <= 1.
PcaTransform fit_pca(const Dataset& train, double variance_threshold);

// The preprocessing stack a trained model carries: features are normalized
// and optionally PCA-projected before prediction, and predictions are mapped
// back to raw target units on the way out.
struct Preprocessing {
  NormalizationMap norm;
  std::optional<PcaTransform> pca;

  static Preprocessing identity(Eigen::Index dim);

  Eigen::VectorXd transform(const Eigen::VectorXd& raw) const;
  Dataset transform(const Dataset& raw) const;
  double invert_target(double model_units) const { return norm.invert_target(model_units); }
};

}  // namespace edwsvr
