#include "edwsvr/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace edwsvr {

namespace {

void check_spec(const KernelSpec& spec) {
  if (spec.kind == KernelSpec::Kind::rbf && !(spec.gamma > 0.0))
    throw std::invalid_argument("kernel: rbf gamma must be positive");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_spec(spec);
  if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.kind == KernelSpec::Kind::linear) return a.dot(b);
  return std::exp(-spec.gamma * (a - b).squaredNorm());
}

GramMatrix gram_augmented(const KernelSpec& spec, const Dataset& data) {
  check_spec(spec);
  const Eigen::Index n = data.n();
  GramMatrix gram;
  gram.spec = spec;
  gram.values.resize(n, n);
  if (spec.kind == KernelSpec::Kind::linear) {
    gram.values = data.features * data.features.transpose();
    gram.values.array() += 1.0;
    // Mirror the lower triangle so symmetry is exact, not just to roundoff.
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < i; ++j) gram.values(j, i) = gram.values(i, j);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      gram.values(i, i) = 2.0;  // K(x,x) = 1 plus the bias term
      for (Eigen::Index j = 0; j < i; ++j) {
        double v = std::exp(-spec.gamma * (data.features.row(i) - data.features.row(j)).squaredNorm()) + 1.0;
        gram.values(i, j) = v;
        gram.values(j, i) = v;
      }
    }
  }
  return gram;
}

Eigen::VectorXd kernel_row(const KernelSpec& spec, const Eigen::MatrixXd& support_points,
                           const Eigen::VectorXd& query) {
  check_spec(spec);
  const Eigen::Index k = support_points.rows();
  if (k > 0 && support_points.cols() != query.size())
    throw std::invalid_argument("kernel_row: dimension mismatch");
  Eigen::VectorXd row(k);
  if (spec.kind == KernelSpec::Kind::linear) {
    row = support_points * query;
    row.array() += 1.0;
  } else {
    for (Eigen::Index i = 0; i < k; ++i)
      row(i) = std::exp(-spec.gamma * (support_points.row(i).transpose() - query).squaredNorm()) + 1.0;
  }
  return row;
}

}  // namespace edwsvr
