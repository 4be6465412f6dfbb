#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>

#include "edwsvr/kernels.hpp"
#include "edwsvr/preprocess.hpp"

namespace edwsvr::cd {

struct CdConfig {
  double lambda1 = 1.0;   // weight on the mean squared functional margin
  double c_upper = 1.0;   // box bound C on the dual variables
  double epsilon = 0.1;   // e-tube half-width
  int max_sweeps = 1000;
  double tol = 1e-6;      // stop when the largest coordinate change in a sweep drops below
  double ridge = -1.0;    // added to Q's diagonal; < 0 selects 1e-8 * trace(Q)/n
                          // with x10 escalation on factorization failure
};

// Everything Algorithm-shaped work needs after the one-time factorization:
//   Q = (2 lambda1 / n) G^2 + G + ridge I   (solved, never inverted)
//   A = Q^{-1} G        theta updates walk columns of A
//   H = G Q^{-1} G      dual Hessian block; h_diag are the Newton curvatures
struct PrecomputedDual {
  GramMatrix gram;
  Eigen::MatrixXd A;
  Eigen::MatrixXd H;
  Eigen::VectorXd h_diag;
  double ridge_used = 0.0;
};

PrecomputedDual precompute(GramMatrix gram, const CdConfig& cfg);

// Paired box variables and the coefficient vector they induce. theta always
// equals Q^{-1}(G(beta - beta_star) - p) for the current pair, maintained
// incrementally.
struct DualState {
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd theta;
};

DualState init_state(const PrecomputedDual& pre, const Eigen::VectorXd& y, const CdConfig& cfg);

// Gradient of the dual objective at coordinate k in [0, 2n): the first n
// coordinates are beta, the rest beta_star.
double cd_gradient(Eigen::Index k, const Eigen::VectorXd& theta, const Eigen::MatrixXd& gram,
                   const Eigen::VectorXd& y, double epsilon);

// One clipped Newton step on coordinate k; updates theta in place and returns
// the applied coordinate change.
double cd_update(Eigen::Index k, DualState& state, const PrecomputedDual& pre,
                 const Eigen::VectorXd& y, const CdConfig& cfg);

// Dual objective 1/2 d'Hd + (2 lambda1/n) y'Hd - y'd + eps sum(beta+beta*)
// with d = beta - beta_star; the constant dropped from the derivation stays
// dropped. Materialized from H for instrumented descent checks.
double dual_objective(const PrecomputedDual& pre, const Eigen::VectorXd& y, const CdConfig& cfg,
                      const DualState& state);

// Called after every coordinate update when instrumenting a run.
using CdCallback = std::function<void(Eigen::Index k, const DualState& state, double delta)>;

struct DualModel {
  Eigen::VectorXd theta;           // coefficients with |theta_i| > 1e-12
  Eigen::MatrixXd support_points;  // matching rows, in post-preprocessing space
  KernelSpec spec;
  Preprocessing prep;
};

DualModel train_cd(const Dataset& data, const KernelSpec& spec, const CdConfig& cfg,
                   const CdCallback& callback = nullptr);

// kernel_row dot theta in model units, then back through the target map.
double predict_dual(const DualModel& model, const Eigen::VectorXd& query);
Eigen::VectorXd predict_dual_batch(const DualModel& model, const Eigen::MatrixXd& queries);

// e-tube slacks (xi, xi_star) of a trained model on a dataset, both in
// normalized target units.
std::pair<Eigen::VectorXd, Eigen::VectorXd> slack_diagnostics(const DualModel& model,
                                                              const Dataset& data, double epsilon);

}  // namespace edwsvr::cd
