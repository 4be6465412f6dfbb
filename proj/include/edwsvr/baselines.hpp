#pragma once

#include <Eigen/Dense>
#include <functional>

#include "edwsvr/cd_solver.hpp"
#include "edwsvr/dataset.hpp"
#include "edwsvr/kernels.hpp"
#include "edwsvr/preprocess.hpp"

namespace edwsvr::baselines {

// Epsilon-insensitive SVR with the bias folded into the kernel, so the dual is a
// pure box QP over [0, C]^{2n}: min 1/2 d' G d - y' d + eps * sum(a + a*), d = a - a*.
struct EsvrConfig {
  double c_upper = 1.0;
  double epsilon = 0.1;
  int max_sweeps = 1000;
  double tol = 1e-6;
};

// theta = alpha - alpha_star lives in the same prediction form as the weighted solver:
// f(x) = sum_i theta_i * (K(x_i, x) + 1).
cd::DualModel train_esvr(const Dataset& data, const KernelSpec& spec, const EsvrConfig& cfg,
                         const cd::CdCallback& callback = nullptr);

double esvr_dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double epsilon,
                           const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_star);

// Ordinary least squares on bias-augmented features via normal equations.
struct OlsModel {
  Eigen::VectorXd w_aug;  // size dim + 1, last entry is the intercept
  Preprocessing prep;
};

OlsModel train_ols(const Dataset& data);

double predict_ols(const OlsModel& model, const Eigen::VectorXd& query);
Eigen::VectorXd predict_ols_batch(const OlsModel& model, const Eigen::MatrixXd& queries);

}  // namespace edwsvr::baselines
