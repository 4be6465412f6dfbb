#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "edwsvr/dataset.hpp"
#include "edwsvr/preprocess.hpp"

namespace edwsvr::asgd {

// Averaged stochastic subgradient descent on the linear primal
//   g(w) = 1/2 ||w||^2 + (lambda1/n) * (sum_i (w.x~_i)^2 - 2 sum_i y_i (w.x~_i))
//          + C * sum_i max(0, |w.x~_i - y_i| - epsilon)
// where x~_i is the feature vector with a constant 1 appended (bias absorbed).
struct AsgdConfig {
  double lambda1 = 1.0;
  double c_upper = 1.0;
  double epsilon = 0.1;
  int passes = 5;        // total steps = passes * n
  long long t0 = -1;     // averaging starts in earnest after t0 steps; -1 means n
  double eta0 = 0.1;
  double a = 1.0;
  double c_exp = 0.75;
  std::uint64_t seed = 0;
};

struct LinearModel {
  Eigen::VectorXd w_aug;  // size dim + 1, last entry multiplies the constant feature
  Preprocessing prep;
};

// Features with a column of ones appended, the layout every routine below expects.
Eigen::MatrixXd augment_ones(const Eigen::MatrixXd& features);

// Subgradient sign of the epsilon-insensitive loss at the given residual
// (prediction minus target): 0 at or inside the tube boundary, else the sign.
double tube_sign(double residual, double epsilon);

// Single-sample estimate whose expectation over uniform i equals full_gradient.
Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& x_aug,
                                    double y, const AsgdConfig& cfg, Eigen::Index n);

Eigen::VectorXd full_gradient(const Eigen::VectorXd& w, const Eigen::MatrixXd& x_aug,
                              const Eigen::VectorXd& y, const AsgdConfig& cfg);

double objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                 const AsgdConfig& cfg);

// eta_t = eta0 * (1 + a * eta0 * t)^(-c_exp)
double learning_rate(const AsgdConfig& cfg, long long t);

// delta_t = 1 / max(1, t - t0); the running average restarts while t <= t0 + 1.
double averaging_rate(long long t, long long t0);

LinearModel train_asgd(const Dataset& data, const AsgdConfig& cfg);

double predict_linear(const LinearModel& model, const Eigen::VectorXd& query);
Eigen::VectorXd predict_linear_batch(const LinearModel& model, const Eigen::MatrixXd& queries);

}  // namespace edwsvr::asgd
