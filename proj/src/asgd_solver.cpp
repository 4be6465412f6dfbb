#include "edwsvr/asgd_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "edwsvr/rng.hpp"

namespace edwsvr::asgd {

Eigen::MatrixXd augment_ones(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) = features;
  out.col(features.cols()).setOnes();
  return out;
}

double tube_sign(double residual, double epsilon) {
  if (residual > epsilon) return 1.0;
  if (residual < -epsilon) return -1.0;
  return 0.0;
}

Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& x_aug,
                                    double y, const AsgdConfig& cfg, Eigen::Index n) {
  const double residual = x_aug.dot(w) - y;
  const double coef =
      2.0 * cfg.lambda1 * residual + static_cast<double>(n) * cfg.c_upper * tube_sign(residual, cfg.epsilon);
  return w + coef * x_aug;
}

Eigen::VectorXd full_gradient(const Eigen::VectorXd& w, const Eigen::MatrixXd& x_aug,
                              const Eigen::VectorXd& y, const AsgdConfig& cfg) {
  const auto n = static_cast<double>(x_aug.rows());
  Eigen::VectorXd residuals = x_aug * w - y;
  Eigen::VectorXd grad = w + (2.0 * cfg.lambda1 / n) * (x_aug.transpose() * residuals);
  for (Eigen::Index i = 0; i < x_aug.rows(); ++i) {
    const double sigma = tube_sign(residuals(i), cfg.epsilon);
    if (sigma != 0.0) grad += cfg.c_upper * sigma * x_aug.row(i).transpose();
  }
  return grad;
}

double objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                 const AsgdConfig& cfg) {
  const auto n = static_cast<double>(x_aug.rows());
  Eigen::VectorXd fitted = x_aug * w;
  double value = 0.5 * w.squaredNorm();
  value += (cfg.lambda1 / n) * (fitted.squaredNorm() - 2.0 * y.dot(fitted));
  for (Eigen::Index i = 0; i < x_aug.rows(); ++i)
    value += cfg.c_upper * std::max(0.0, std::abs(fitted(i) - y(i)) - cfg.epsilon);
  return value;
}

double learning_rate(const AsgdConfig& cfg, long long t) {
  return cfg.eta0 * std::pow(1.0 + cfg.a * cfg.eta0 * static_cast<double>(t), -cfg.c_exp);
}

double averaging_rate(long long t, long long t0) {
  return 1.0 / static_cast<double>(std::max<long long>(1, t - t0));
}

LinearModel train_asgd(const Dataset& data, const AsgdConfig& cfg) {
  data.validate();
  if (cfg.lambda1 < 0) throw std::invalid_argument("train_asgd: lambda1 must be nonnegative");
  if (cfg.c_upper < 0) throw std::invalid_argument("train_asgd: C must be nonnegative");
  if (cfg.epsilon < 0) throw std::invalid_argument("train_asgd: epsilon must be nonnegative");
  if (cfg.passes < 1) throw std::invalid_argument("train_asgd: passes must be positive");
  if (!(cfg.eta0 > 0)) throw std::invalid_argument("train_asgd: eta0 must be positive");

  const Eigen::Index n = data.n();
  const Eigen::MatrixXd x_aug = augment_ones(data.features);
  const long long t0 = cfg.t0 < 0 ? static_cast<long long>(n) : cfg.t0;
  const long long steps = static_cast<long long>(cfg.passes) * static_cast<long long>(n);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(x_aug.cols());
  Eigen::VectorXd w_bar = Eigen::VectorXd::Zero(x_aug.cols());
  Rng rng(cfg.seed);

  for (long long t = 1; t <= steps; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    const double residual = x_aug.row(i).dot(w) - data.targets(i);
    const double coef = 2.0 * cfg.lambda1 * residual +
                        static_cast<double>(n) * cfg.c_upper * tube_sign(residual, cfg.epsilon);
    const double eta = learning_rate(cfg, t);
    w *= (1.0 - eta);
    w.noalias() -= (eta * coef) * x_aug.row(i).transpose();
    const double delta = averaging_rate(t, t0);
    w_bar *= (1.0 - delta);
    w_bar.noalias() += delta * w;
  }

  LinearModel model;
  model.w_aug = w_bar;
  model.prep = Preprocessing::identity(data.dim());
  return model;
}

double predict_linear(const LinearModel& model, const Eigen::VectorXd& query) {
  Eigen::VectorXd q = model.prep.transform(query);
  const Eigen::Index d = model.w_aug.size() - 1;
  if (q.size() != d) throw std::invalid_argument("predict_linear: query dimension mismatch");
  return model.prep.invert_target(model.w_aug.head(d).dot(q) + model.w_aug(d));
}

Eigen::VectorXd predict_linear_batch(const LinearModel& model, const Eigen::MatrixXd& queries) {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out(i) = predict_linear(model, queries.row(i).transpose());
  return out;
}

}  // namespace edwsvr::asgd
