#pragma once

#include <Eigen/Core>
#include <optional>

namespace edwsvr {

struct Metrics {
  double mse = 0.0;
  // Unset when the targets have zero variance (or fewer than two values).
  std::optional<double> r2;
};

Metrics evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

// Mean of the squared residuals (f(x_i) - y_i)^2; numerically identical to
// the MSE, exposed separately as a training diagnostic.
double mean_functional_margin(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

}  // namespace edwsvr
