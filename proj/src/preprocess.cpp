#include "edwsvr/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace edwsvr {

namespace {

double scale_to_unit(double v, double lo, double hi) {
  double span = hi - lo;
  return span == 0.0 ? 0.0 : (v - lo) / span;
}

double unit_to_scale(double v, double lo, double hi) { return v * (hi - lo) + lo; }

}  // namespace

NormalizationMap NormalizationMap::identity(Eigen::Index dim) {
  NormalizationMap map;
  map.feature_min = Eigen::VectorXd::Zero(dim);
  map.feature_max = Eigen::VectorXd::Ones(dim);
  return map;
}

Eigen::VectorXd NormalizationMap::apply_features(const Eigen::VectorXd& raw) const {
  if (raw.size() != feature_min.size())
    throw std::invalid_argument("normalization: feature dimension mismatch");
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j)
    out(j) = scale_to_unit(raw(j), feature_min(j), feature_max(j));
  return out;
}

Eigen::VectorXd NormalizationMap::invert_features(const Eigen::VectorXd& scaled) const {
  if (scaled.size() != feature_min.size())
    throw std::invalid_argument("normalization: feature dimension mismatch");
  Eigen::VectorXd out(scaled.size());
  for (Eigen::Index j = 0; j < scaled.size(); ++j)
    out(j) = unit_to_scale(scaled(j), feature_min(j), feature_max(j));
  return out;
}

double NormalizationMap::apply_target(double raw) const {
  return scale_to_unit(raw, target_min, target_max);
}

double NormalizationMap::invert_target(double scaled) const {
  return unit_to_scale(scaled, target_min, target_max);
}

Dataset NormalizationMap::apply(const Dataset& data) const {
  Dataset out = data;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out.features.row(i) = apply_features(data.features.row(i).transpose()).transpose();
    out.targets(i) = apply_target(data.targets(i));
  }
  return out;
}

Dataset NormalizationMap::invert(const Dataset& data) const {
  Dataset out = data;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out.features.row(i) = invert_features(data.features.row(i).transpose()).transpose();
    out.targets(i) = invert_target(data.targets(i));
  }
  return out;
}

NormalizationMap fit_minmax(const Dataset& train) {
  train.validate();
  NormalizationMap map;
  map.feature_min = train.features.colwise().minCoeff().transpose();
  map.feature_max = train.features.colwise().maxCoeff().transpose();
  map.target_min = train.targets.minCoeff();
  map.target_max = train.targets.maxCoeff();
  return map;
}

Eigen::VectorXd PcaTransform::apply(const Eigen::VectorXd& x) const {
  if (x.size() != in_dim()) throw std::invalid_argument("pca: dimension mismatch");
  return components.transpose() * (x - mean);
}

Dataset PcaTransform::apply(const Dataset& data) const {
  if (data.dim() != in_dim()) throw std::invalid_argument("pca: dimension mismatch");
  Dataset out;
  out.features = (data.features.rowwise() - mean.transpose()) * components;
  out.targets = data.targets;
  out.target_name = data.target_name;
  out.feature_names.clear();
  for (Eigen::Index j = 0; j < out_dim(); ++j)
    out.feature_names.push_back("pc" + std::to_string(j + 1));
  return out;
}

Eigen::MatrixXd PcaTransform::reconstruct(const Eigen::MatrixXd& projected) const {
  return (projected * components.transpose()).rowwise() + mean.transpose();
}

PcaTransform fit_pca(const Dataset& train, double variance_threshold) {
  train.validate();
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    throw std::invalid_argument("pca: variance threshold must be in (0,1]");
  const Eigen::Index n = train.n();
  const Eigen::Index d = train.dim();
  if (n < 2) throw std::invalid_argument("pca: need at least two rows");

  Eigen::RowVectorXd mean = train.features.colwise().mean();
  Eigen::MatrixXd centered = train.features.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");

  // Ascending from Eigen; reorder descending and clamp tiny negatives.
  Eigen::VectorXd evals(d);
  Eigen::MatrixXd evecs(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    evals(j) = std::max(eig.eigenvalues()(d - 1 - j), 0.0);
    evecs.col(j) = eig.eigenvectors().col(d - 1 - j);
  }

  double total = evals.sum();
  if (total <= 0.0) throw std::runtime_error("pca: zero total variance (all rows identical)");

  Eigen::Index k = d;
  double cum = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    cum += evals(j);
    if (cum / total >= variance_threshold) {
      k = j + 1;
      break;
    }
  }

  PcaTransform t;
  t.mean = mean.transpose();
  t.components = evecs.leftCols(k);
  t.eigenvalues = evals.head(k);
  t.retained_variance_fraction = evals.head(k).sum() / total;

  // Canonical sign: largest-magnitude coordinate of each component positive.
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    t.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (t.components(arg, j) < 0.0) t.components.col(j) = -t.components.col(j);
  }
  return t;
}

Preprocessing Preprocessing::identity(Eigen::Index dim) {
  return Preprocessing{NormalizationMap::identity(dim), std::nullopt};
}

Eigen::VectorXd Preprocessing::transform(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd v = norm.apply_features(raw);
  if (pca) v = pca->apply(v);
  return v;
}

Dataset Preprocessing::transform(const Dataset& raw) const {
  Dataset v = norm.apply(raw);
  if (pca) v = pca->apply(v);
  return v;
}

}  // namespace edwsvr
