#include "edwsvr/cd_solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edwsvr::cd {

namespace {

constexpr double kSparsityThreshold = 1e-12;

Eigen::MatrixXd build_q(const Eigen::MatrixXd& g, double lambda1, double ridge) {
  const auto n = static_cast<double>(g.rows());
  Eigen::MatrixXd q = (2.0 * lambda1 / n) * (g * g) + g;
  q.diagonal().array() += ridge;
  return q;
}

}  // namespace

PrecomputedDual precompute(GramMatrix gram, const CdConfig& cfg) {
  if (cfg.lambda1 < 0) throw std::invalid_argument("precompute: lambda1 must be nonnegative");
  const Eigen::Index n = gram.values.rows();
  if (n < 1 || gram.values.cols() != n) throw std::invalid_argument("precompute: bad Gram matrix");

  const double trace_scale = build_q(gram.values, cfg.lambda1, 0.0).trace() / static_cast<double>(n);

  Eigen::LLT<Eigen::MatrixXd> llt;
  double ridge_used = 0.0;
  bool factored = false;
  if (cfg.ridge >= 0.0) {
    ridge_used = cfg.ridge;
    llt.compute(build_q(gram.values, cfg.lambda1, ridge_used));
    factored = llt.info() == Eigen::Success;
  } else {
    for (double factor = 1e-8; factor <= 1e-2 * (1.0 + 1e-15); factor *= 10.0) {
      ridge_used = factor * trace_scale;
      llt.compute(build_q(gram.values, cfg.lambda1, ridge_used));
      if (llt.info() == Eigen::Success) {
        factored = true;
        break;
      }
    }
  }
  if (!factored)
    throw std::runtime_error("precompute: Q factorization failed after ridge escalation; "
                             "Gram matrix is too ill-conditioned");

  PrecomputedDual pre;
  pre.A = llt.solve(gram.values);
  pre.H = gram.values * pre.A;
  pre.H = 0.5 * (pre.H + pre.H.transpose().eval());  // kill roundoff asymmetry
  pre.h_diag = pre.H.diagonal();
  pre.ridge_used = ridge_used;
  pre.gram = std::move(gram);

  if ((pre.h_diag.array() <= 0.0).any())
    throw std::runtime_error("precompute: nonpositive dual curvature; Gram matrix is degenerate");
  return pre;
}

DualState init_state(const PrecomputedDual& pre, const Eigen::VectorXd& y, const CdConfig& cfg) {
  const Eigen::Index n = pre.gram.values.rows();
  if (y.size() != n) throw std::invalid_argument("init_state: target length mismatch");
  DualState state;
  state.beta = Eigen::VectorXd::Zero(n);
  state.beta_star = Eigen::VectorXd::Zero(n);
  state.theta = (2.0 * cfg.lambda1 / static_cast<double>(n)) * (pre.A * y);
  return state;
}

double cd_gradient(Eigen::Index k, const Eigen::VectorXd& theta, const Eigen::MatrixXd& gram,
                   const Eigen::VectorXd& y, double epsilon) {
  const Eigen::Index n = gram.rows();
  if (k < 0 || k >= 2 * n) throw std::invalid_argument("cd_gradient: index out of range");
  const Eigen::Index j = k < n ? k : k - n;
  const double residual = gram.row(j).dot(theta) - y(j);
  return k < n ? epsilon + residual : epsilon - residual;
}

double cd_update(Eigen::Index k, DualState& state, const PrecomputedDual& pre,
                 const Eigen::VectorXd& y, const CdConfig& cfg) {
  const Eigen::Index n = pre.gram.values.rows();
  const Eigen::Index j = k < n ? k : k - n;
  const double grad = cd_gradient(k, state.theta, pre.gram.values, y, cfg.epsilon);
  double& coord = k < n ? state.beta(j) : state.beta_star(j);
  const double updated = std::clamp(coord - grad / pre.h_diag(j), 0.0, cfg.c_upper);
  const double delta = updated - coord;
  if (delta != 0.0) {
    coord = updated;
    // theta = A (beta - beta_star) + init offset, so it moves along column j.
    state.theta += (k < n ? delta : -delta) * pre.A.col(j);
  }
  return delta;
}

double dual_objective(const PrecomputedDual& pre, const Eigen::VectorXd& y, const CdConfig& cfg,
                      const DualState& state) {
  const auto n = static_cast<double>(y.size());
  Eigen::VectorXd d = state.beta - state.beta_star;
  Eigen::VectorXd hd = pre.H * d;
  return 0.5 * d.dot(hd) + (2.0 * cfg.lambda1 / n) * y.dot(hd) - y.dot(d) +
         cfg.epsilon * (state.beta.sum() + state.beta_star.sum());
}

DualModel train_cd(const Dataset& data, const KernelSpec& spec, const CdConfig& cfg,
                   const CdCallback& callback) {
  data.validate();
  if (cfg.c_upper < 0) throw std::invalid_argument("train_cd: C must be nonnegative");
  if (cfg.epsilon < 0) throw std::invalid_argument("train_cd: epsilon must be nonnegative");
  if (!(cfg.tol > 0)) throw std::invalid_argument("train_cd: tol must be positive");

  const Eigen::Index n = data.n();
  PrecomputedDual pre = precompute(gram_augmented(spec, data), cfg);
  DualState state = init_state(pre, data.targets, cfg);

  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
      double delta = cd_update(k, state, pre, data.targets, cfg);
      if (callback) callback(k, state, delta);
      max_delta = std::max(max_delta, std::abs(delta));
    }
    if (max_delta < cfg.tol) break;
  }

  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(state.theta(i)) > kSparsityThreshold) ++kept;

  DualModel model;
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

double predict_dual(const DualModel& model, const Eigen::VectorXd& query) {
  Eigen::VectorXd q = model.prep.transform(query);
  double value = model.theta.size() == 0 ? 0.0 : model.theta.dot(kernel_row(model.spec, model.support_points, q));
  return model.prep.invert_target(value);
}

Eigen::VectorXd predict_dual_batch(const DualModel& model, const Eigen::MatrixXd& queries) {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out(i) = predict_dual(model, queries.row(i).transpose());
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> slack_diagnostics(const DualModel& model,
                                                              const Dataset& data, double epsilon) {
  const Eigen::Index n = data.n();
  Eigen::VectorXd xi(n), xi_star(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd q = model.prep.transform(data.features.row(i).transpose());
    double fitted = model.theta.size() == 0 ? 0.0 : model.theta.dot(kernel_row(model.spec, model.support_points, q));
    double y = model.prep.norm.apply_target(data.targets(i));
    xi(i) = std::max(0.0, y - fitted - epsilon);
    xi_star(i) = std::max(0.0, fitted - y - epsilon);
  }
  return {xi, xi_star};
}

}  // namespace edwsvr::cd
