#include "edwsvr/baselines.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edwsvr::baselines {

namespace {

constexpr double kSparsityThreshold = 1e-12;

}  // namespace

cd::DualModel train_esvr(const Dataset& data, const KernelSpec& spec, const EsvrConfig& cfg,
                         const cd::CdCallback& callback) {
  data.validate();
  if (cfg.c_upper < 0) throw std::invalid_argument("train_esvr: C must be nonnegative");
  if (cfg.epsilon < 0) throw std::invalid_argument("train_esvr: epsilon must be nonnegative");
  if (!(cfg.tol > 0)) throw std::invalid_argument("train_esvr: tol must be positive");

  const Eigen::Index n = data.n();
  GramMatrix gram = gram_augmented(spec, data);
  const Eigen::MatrixXd& g = gram.values;
  const Eigen::VectorXd& y = data.targets;

  cd::DualState state;
  state.beta = Eigen::VectorXd::Zero(n);
  state.beta_star = Eigen::VectorXd::Zero(n);
  state.theta = Eigen::VectorXd::Zero(n);  // alpha - alpha_star

  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
      const Eigen::Index j = k < n ? k : k - n;
      const double residual = g.row(j).dot(state.theta) - y(j);
      const double grad = k < n ? cfg.epsilon + residual : cfg.epsilon - residual;
      double& coord = k < n ? state.beta(j) : state.beta_star(j);
      const double updated = std::clamp(coord - grad / g(j, j), 0.0, cfg.c_upper);
      const double delta = updated - coord;
      if (delta != 0.0) {
        coord = updated;
        state.theta(j) += k < n ? delta : -delta;
      }
      if (callback) callback(k, state, delta);
      max_delta = std::max(max_delta, std::abs(delta));
    }
    if (max_delta < cfg.tol) break;
  }

  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(state.theta(i)) > kSparsityThreshold) ++kept;

  cd::DualModel model;
  model.spec = spec;
  model.prep = Preprocessing::identity(data.dim());
  model.theta.resize(kept);
  model.support_points.resize(kept, data.dim());
  for (Eigen::Index i = 0, s = 0; i < n; ++i) {
    if (std::abs(state.theta(i)) > kSparsityThreshold) {
      model.theta(s) = state.theta(i);
      model.support_points.row(s) = data.features.row(i);
      ++s;
    }
  }
  return model;
}

double esvr_dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double epsilon,
                           const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_star) {
  Eigen::VectorXd d = alpha - alpha_star;
  return 0.5 * d.dot(gram * d) - y.dot(d) + epsilon * (alpha.sum() + alpha_star.sum());
}

OlsModel train_ols(const Dataset& data) {
  data.validate();
  const Eigen::Index n = data.n();
  const Eigen::Index d = data.dim();

  Eigen::MatrixXd x_aug(n, d + 1);
  x_aug.leftCols(d) = data.features;
  x_aug.col(d).setOnes();

  Eigen::MatrixXd gram = x_aug.transpose() * x_aug;
  // Tiny ridge keeps the normal equations solvable when columns are collinear.
  gram.diagonal().array() += 1e-10 * std::max(1.0, gram.trace() / static_cast<double>(d + 1));
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("train_ols: normal equations factorization failed");

  OlsModel model;
  model.w_aug = ldlt.solve(x_aug.transpose() * data.targets);
  model.prep = Preprocessing::identity(d);
  return model;
}

double predict_ols(const OlsModel& model, const Eigen::VectorXd& query) {
  Eigen::VectorXd q = model.prep.transform(query);
  const Eigen::Index d = model.w_aug.size() - 1;
  if (q.size() != d) throw std::invalid_argument("predict_ols: query dimension mismatch");
  return model.prep.invert_target(model.w_aug.head(d).dot(q) + model.w_aug(d));
}

Eigen::VectorXd predict_ols_batch(const OlsModel& model, const Eigen::MatrixXd& queries) {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out(i) = predict_ols(model, queries.row(i).transpose());
  return out;
}

}  // namespace edwsvr::baselines
