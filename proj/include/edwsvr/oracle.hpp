#pragma once

#include <Eigen/Dense>
#include <functional>

namespace edwsvr::oracle {

// Reference solvers used only to verify the production solvers. They share no
// code with the solvers under test: plain projected gradient for box QPs and
// ADMM for the nonsmooth primals.

struct BoxQpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double residual = 0.0;  // sup-norm fixed-point residual at exit
};

// min 1/2 x'Mx + q'x subject to 0 <= x <= c_upper, M symmetric PSD.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& m, const Eigen::VectorXd& q, double c_upper,
                         int max_iters = 500000, double tol = 1e-12);

// P(theta) = 1/2 theta'G theta + (lambda1/n)(||G theta||^2 - 2 y'G theta)
//            + C * sum_i max(0, |[G theta]_i - y_i| - epsilon)
double kernel_primal_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                               double lambda1, double c_upper, double epsilon,
                               const Eigen::VectorXd& theta);

// Gradient of P where it is differentiable (no fitted value on a tube boundary);
// a subgradient elsewhere.
Eigen::VectorXd kernel_primal_subgradient(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                          double lambda1, double c_upper, double epsilon,
                                          const Eigen::VectorXd& theta);

struct AdmmResult {
  Eigen::VectorXd solution;  // theta for the kernel primal, w for the linear primal
  Eigen::VectorXd fitted;    // G theta, respectively X~ w
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

AdmmResult minimize_kernel_primal(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                  double lambda1, double c_upper, double epsilon, double rho = 1.0,
                                  int max_iters = 200000, double tol = 1e-10);

// g(w) = 1/2 ||w||^2 + (lambda1/n)(||X~w||^2 - 2 y'X~w)
//        + C * sum_i max(0, |x~_i.w - y_i| - epsilon), x_aug already carries the ones column.
double linear_primal_objective(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                               double lambda1, double c_upper, double epsilon,
                               const Eigen::VectorXd& w);

AdmmResult minimize_linear_primal(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                                  double lambda1, double c_upper, double epsilon, double rho = 1.0,
                                  int max_iters = 200000, double tol = 1e-10);

// Deliberately simple descent: normalized-direction steps, halved until the
// objective drops and regrown slightly after each accepted move, with one
// unconditional diminishing hop whenever a hinge kink jams the line search.
// Descent legs alternate with a guarded polish that pins the tube-boundary
// samples the iterate implies and solves that face's equality-constrained
// quadratic exactly; a polish result is kept only when it lowers the
// objective, so the reported objective never exceeds any intermediate best.
// `budget` caps objective/direction evaluations across the legs (the polish
// adds a small bounded number on top). Independent of the ADMM minimizers
// above, so the two verify each other.
struct DescentResult {
  Eigen::VectorXd solution;  // theta for the kernel primal, w for the linear primal
  Eigen::VectorXd fitted;
  double objective = 0.0;
  long evaluations = 0;
  double final_step = 0.0;
};

DescentResult kernel_primal_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                    double lambda1, double c_upper, double epsilon,
                                    long budget = 200000, double step0 = 0.5);

DescentResult linear_primal_descent(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                                    double lambda1, double c_upper, double epsilon,
                                    long budget = 200000, double step0 = 0.5);

// Max over coordinates of |central difference - grad_i|, divided by max(||grad||_inf, 1).
double finite_diff_max_dev(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& grad, const Eigen::VectorXd& point, double step);

}  // namespace edwsvr::oracle
