#pragma once

#include <Eigen/Core>

#include "edwsvr/dataset.hpp"

namespace edwsvr {

struct KernelSpec {
  enum class Kind { linear, rbf };
  Kind kind = Kind::rbf;
  double gamma = 1.0;  // rbf only, must be > 0
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Augmented Gram matrix: entry (i,j) is K(x_i, x_j) + 1. The +1 carries the
// absorbed bias, so trained models never have a separate intercept.
struct GramMatrix {
  Eigen::MatrixXd values;  // n x n symmetric
  KernelSpec spec;
  bool augmented = true;
};

GramMatrix gram_augmented(const KernelSpec& spec, const Dataset& data);

// Entry i is K(support_i, query) + 1; the prediction-side counterpart of
// gram_augmented.
Eigen::VectorXd kernel_row(const KernelSpec& spec, const Eigen::MatrixXd& support_points,
                           const Eigen::VectorXd& query);

}  // namespace edwsvr
