#include "edwsvr/metrics.hpp"

#include <stdexcept>

namespace edwsvr {

Metrics evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size())
    throw std::invalid_argument("evaluate: length mismatch");
  if (predictions.size() == 0) throw std::invalid_argument("evaluate: empty input");

  const auto n = static_cast<double>(targets.size());
  Metrics m;
  double ss_res = (predictions - targets).squaredNorm();
  m.mse = ss_res / n;
  if (targets.size() >= 2) {
    double mean = targets.mean();
    double ss_tot = (targets.array() - mean).matrix().squaredNorm();
    if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
  }
  return m;
}

double mean_functional_margin(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size())
    throw std::invalid_argument("mean_functional_margin: length mismatch");
  if (predictions.size() == 0) throw std::invalid_argument("mean_functional_margin: empty input");
  return (predictions - targets).squaredNorm() / static_cast<double>(targets.size());
}

}  // namespace edwsvr
