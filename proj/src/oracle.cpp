#include "edwsvr/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace edwsvr::oracle {

namespace {

double hinge(double residual, double epsilon) { return std::max(0.0, std::abs(residual) - epsilon); }

// argmin over z of a*z^2 - 2*a*y*z + c_upper*max(0, |z - y| - epsilon) + (rho/2)*(z - m)^2.
// Convex piecewise quadratic with kinks at y +- epsilon: evaluate each region's
// clipped stationary point and keep the best.
double prox_piecewise(double y, double epsilon, double c_upper, double a, double rho, double m) {
  const double denom = 2.0 * a + rho;
  const double lo = y - epsilon;
  const double hi = y + epsilon;
  const double cand[3] = {
      std::min((2.0 * a * y + c_upper + rho * m) / denom, lo),
      std::clamp((2.0 * a * y + rho * m) / denom, lo, hi),
      std::max((2.0 * a * y - c_upper + rho * m) / denom, hi),
  };
  double best = cand[0];
  double best_val = std::numeric_limits<double>::infinity();
  for (double z : cand) {
    const double val = a * z * z - 2.0 * a * y * z + c_upper * hinge(z - y, epsilon) +
                       0.5 * rho * (z - m) * (z - m);
    if (val < best_val) {
      best_val = val;
      best = z;
    }
  }
  return best;
}

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& m, const Eigen::VectorXd& q, double c_upper,
                         int max_iters, double tol) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || q.size() != n) throw std::invalid_argument("solve_box_qp: shape mismatch");
  if (c_upper < 0) throw std::invalid_argument("solve_box_qp: c_upper must be nonnegative");

  const double lipschitz = std::max(m.cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  BoxQpResult res;
  res.x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad(n), next(n);
  for (int it = 0; it < max_iters; ++it) {
    grad.noalias() = m * res.x;
    grad += q;
    next = (res.x - step * grad).cwiseMax(0.0).cwiseMin(c_upper);
    res.residual = (res.x - next).lpNorm<Eigen::Infinity>();
    res.x.swap(next);
    res.iterations = it + 1;
    if (res.residual < tol) break;
  }
  res.objective = 0.5 * res.x.dot(m * res.x) + q.dot(res.x);
  return res;
}

double kernel_primal_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                               double lambda1, double c_upper, double epsilon,
                               const Eigen::VectorXd& theta) {
  const auto n = static_cast<double>(y.size());
  Eigen::VectorXd fitted = gram * theta;
  double value = 0.5 * theta.dot(fitted);
  value += (lambda1 / n) * (fitted.squaredNorm() - 2.0 * y.dot(fitted));
  for (Eigen::Index i = 0; i < y.size(); ++i) value += c_upper * hinge(fitted(i) - y(i), epsilon);
  return value;
}

Eigen::VectorXd kernel_primal_subgradient(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                          double lambda1, double c_upper, double epsilon,
                                          const Eigen::VectorXd& theta) {
  const auto n = static_cast<double>(y.size());
  Eigen::VectorXd fitted = gram * theta;
  Eigen::VectorXd z = theta + (2.0 * lambda1 / n) * (fitted - y);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double r = fitted(i) - y(i);
    if (r > epsilon)
      z(i) += c_upper;
    else if (r < -epsilon)
      z(i) -= c_upper;
  }
  return gram * z;
}

AdmmResult minimize_kernel_primal(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                  double lambda1, double c_upper, double epsilon, double rho,
                                  int max_iters, double tol) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || y.size() != n)
    throw std::invalid_argument("minimize_kernel_primal: shape mismatch");
  const double a = lambda1 / static_cast<double>(n);

  // theta-step: min 1/2 theta'G theta + rho/2 ||G theta - t||^2 is solved by
  // theta = rho (I + rho G)^{-1} t, since (I + rho G) commutes with G.
  Eigen::MatrixXd system = rho * gram;
  system.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("minimize_kernel_primal: factorization failed");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z_prev(n);

  AdmmResult res;
  for (int it = 0; it < max_iters; ++it) {
    theta = rho * llt.solve(z - u);
    fitted.noalias() = gram * theta;
    z_prev = z;
    for (Eigen::Index i = 0; i < n; ++i)
      z(i) = prox_piecewise(y(i), epsilon, c_upper, a, rho, fitted(i) + u(i));
    u += fitted - z;
    res.iterations = it + 1;
    res.primal_residual = (fitted - z).lpNorm<Eigen::Infinity>();
    res.dual_residual = rho * (gram * (z - z_prev)).lpNorm<Eigen::Infinity>();
    if (res.primal_residual < tol && res.dual_residual < tol) break;
  }
  res.solution = theta;
  res.fitted = fitted;
  res.objective = kernel_primal_objective(gram, y, lambda1, c_upper, epsilon, theta);
  return res;
}

double linear_primal_objective(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                               double lambda1, double c_upper, double epsilon,
                               const Eigen::VectorXd& w) {
  const auto n = static_cast<double>(y.size());
  Eigen::VectorXd fitted = x_aug * w;
  double value = 0.5 * w.squaredNorm();
  value += (lambda1 / n) * (fitted.squaredNorm() - 2.0 * y.dot(fitted));
  for (Eigen::Index i = 0; i < y.size(); ++i) value += c_upper * hinge(fitted(i) - y(i), epsilon);
  return value;
}

AdmmResult minimize_linear_primal(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                                  double lambda1, double c_upper, double epsilon, double rho,
                                  int max_iters, double tol) {
  const Eigen::Index n = x_aug.rows();
  const Eigen::Index d = x_aug.cols();
  if (y.size() != n) throw std::invalid_argument("minimize_linear_primal: shape mismatch");
  const double scale = 2.0 * lambda1 / static_cast<double>(n);

  // w-step system: (I + (2 lambda1/n + rho) X~'X~) w = X~'((2 lambda1/n) y + rho (z - u)).
  Eigen::MatrixXd system = (scale + rho) * (x_aug.transpose() * x_aug);
  system.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("minimize_linear_primal: factorization failed");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z_prev(n);

  AdmmResult res;
  for (int it = 0; it < max_iters; ++it) {
    w = llt.solve(x_aug.transpose() * (scale * y + rho * (z - u)));
    fitted.noalias() = x_aug * w;
    z_prev = z;
    for (Eigen::Index i = 0; i < n; ++i)
      z(i) = prox_piecewise(y(i), epsilon, c_upper, 0.0, rho, fitted(i) + u(i));
    u += fitted - z;
    res.iterations = it + 1;
    res.primal_residual = (fitted - z).lpNorm<Eigen::Infinity>();
    res.dual_residual = rho * (x_aug.transpose() * (z - z_prev)).lpNorm<Eigen::Infinity>();
    if (res.primal_residual < tol && res.dual_residual < tol) break;
  }
  res.solution = w;
  res.fitted = fitted;
  res.objective = linear_primal_objective(x_aug, y, lambda1, c_upper, epsilon, w);
  return res;
}

namespace {

// One descent leg. `value` evaluates the objective; `direction_at` returns a
// vector whose negative is a descent direction wherever the objective is
// differentiable (the raw subgradient, or a preconditioned version of it).
// A smoothed running average of recent directions is tried before the raw
// one; steps along the normalized direction are halved until the objective
// drops and regrown slightly after each accepted move. A hinge kink can jam
// such a line search even away from the minimum, so a failed search triggers
// one unconditional hop across the kink whose size shrinks geometrically
// with the number of jams. The best iterate seen is tracked separately and
// is what the caller receives, so the reported objective never exceeds the
// starting value. `budget` caps the number of objective and direction
// evaluations in this leg.
DescentResult descend_leg(const Eigen::VectorXd& start,
                          const std::function<double(const Eigen::VectorXd&)>& value,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& direction_at,
                          long budget, double step0) {
  if (budget < 2) throw std::invalid_argument("descend: evaluation budget too small");
  if (!(step0 > 0)) throw std::invalid_argument("descend: step0 must be positive");
  constexpr double kAverage = 0.8;   // weight on the previous smoothed direction
  constexpr double kJamRate = 25.0;  // jams per halving of the hop size

  DescentResult res;
  res.solution = start;
  res.objective = value(res.solution);
  res.evaluations = 1;

  Eigen::VectorXd curr = res.solution;
  double curr_value = res.objective;
  double step = step0;
  long jams = 0;
  Eigen::VectorXd smoothed = Eigen::VectorXd::Zero(start.size());

  Eigen::VectorXd candidate(start.size());
  while (res.evaluations < budget) {
    Eigen::VectorXd raw = direction_at(curr);
    res.evaluations += 1;
    if (raw.norm() < 1e-15) break;
    smoothed = kAverage * smoothed + (1.0 - kAverage) * raw;

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd direction = (attempt == 0) ? smoothed : raw;
      const double norm = direction.norm();
      if (norm < 1e-15) continue;
      direction /= norm;
      double trial = step;
      while (res.evaluations < budget && trial >= 1e-14) {
        candidate = curr - trial * direction;
        const double cand_value = value(candidate);
        res.evaluations += 1;
        if (cand_value < curr_value) {
          curr.swap(candidate);
          curr_value = cand_value;
          step = trial * 1.25;
          accepted = true;
          break;
        }
        trial *= 0.5;
      }
      if (!accepted && attempt == 1) step = trial;
    }
    if (accepted) {
      if (curr_value < res.objective) {
        res.objective = curr_value;
        res.solution = curr;
      }
      continue;
    }
    jams += 1;
    const double hop = step0 * std::pow(2.0, -static_cast<double>(jams) / kJamRate);
    if (hop < 1e-12) break;
    curr -= (hop / raw.norm()) * raw;
    curr_value = value(curr);
    res.evaluations += 1;
    if (curr_value < res.objective) {
      res.objective = curr_value;
      res.solution = curr;
    }
    step = hop;
  }
  res.final_step = step;
  return res;
}

// Exact minimizer of 1/2 x'P x - rhs'x subject to cons x = b, via the dense
// KKT system. Rank-deficient faces can come back garbage; the caller guards
// with an objective comparison.
Eigen::VectorXd solve_face(const Eigen::MatrixXd& p, const Eigen::VectorXd& rhs,
                           const Eigen::MatrixXd& cons, const Eigen::VectorXd& b) {
  const Eigen::Index dim = p.rows();
  const Eigen::Index e = cons.rows();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim + e, dim + e);
  kkt.topLeftCorner(dim, dim) = p;
  kkt.bottomLeftCorner(e, dim) = cons;
  kkt.topRightCorner(dim, e) = cons.transpose();
  Eigen::VectorXd full_rhs(dim + e);
  full_rhs.head(dim) = rhs;
  full_rhs.tail(e) = b;
  return kkt.fullPivLu().solve(full_rhs).head(dim);
}

// The kink structure near the best iterate, at classification width `band`:
// samples whose residual sits within `band` of a tube boundary are pinned to
// that boundary, the rest contribute their fixed hinge slope.
struct FaceSplit {
  std::vector<Eigen::Index> edge;
  Eigen::VectorXd boundary;  // edge.size() leading entries
  Eigen::VectorXd slope;     // full length, entries in {-1, 0, 1}
};

FaceSplit classify_face(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y, double epsilon,
                        double band) {
  const Eigen::Index n = y.size();
  FaceSplit split;
  split.boundary.resize(n);
  split.slope = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = fitted(i) - y(i);
    if (std::abs(std::abs(r) - epsilon) <= band) {
      split.boundary(static_cast<Eigen::Index>(split.edge.size())) =
          y(i) + (r >= 0 ? epsilon : -epsilon);
      split.edge.push_back(i);
    } else if (r > epsilon) {
      split.slope(i) = 1.0;
    } else if (r < -epsilon) {
      split.slope(i) = -1.0;
    }
  }
  return split;
}

constexpr double kPolishBands[] = {3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-6, 1e-9};

}  // namespace

DescentResult kernel_primal_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                    double lambda1, double c_upper, double epsilon, long budget,
                                    double step0) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || y.size() != n)
    throw std::invalid_argument("kernel_primal_descent: shape mismatch");
  const double scale = 2.0 * lambda1 / static_cast<double>(n);

  const auto value = [&](const Eigen::VectorXd& theta) {
    return kernel_primal_objective(gram, y, lambda1, c_upper, epsilon, theta);
  };
  // The subgradient factors as G z; stepping along -z instead of -G z is
  // steepest descent in the geometry G induces (the directional derivative
  // along -z is -z'Gz <= 0) and sidesteps G's conditioning.
  const auto direction = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd fitted = gram * theta;
    Eigen::VectorXd z = theta + scale * (fitted - y);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = fitted(i) - y(i);
      if (r > epsilon)
        z(i) += c_upper;
      else if (r < -epsilon)
        z(i) -= c_upper;
    }
    return z;
  };
  // Face polish: pin the boundary samples the iterate implies, solve that
  // equality-constrained quadratic exactly, keep the result only if the
  // objective drops. The quadratic block is G + scale G^2; the hinge leaves
  // the linear term C G slope.
  const auto polish = [&](DescentResult& res) {
    Eigen::MatrixXd quad = gram + scale * (gram * gram);
    for (double band : kPolishBands) {
      for (int pass = 0; pass < 3; ++pass) {
        FaceSplit split = classify_face(gram * res.solution, y, epsilon, band);
        const auto e = static_cast<Eigen::Index>(split.edge.size());
        Eigen::MatrixXd cons(e, n);
        for (Eigen::Index k = 0; k < e; ++k)
          cons.row(k) = gram.row(split.edge[static_cast<std::size_t>(k)]);
        Eigen::VectorXd rhs = scale * (gram * y) - c_upper * (gram * split.slope);
        Eigen::VectorXd theta = solve_face(quad, rhs, cons, split.boundary.head(e));
        if (!theta.allFinite()) break;
        const double obj = value(theta);
        res.evaluations += 1;
        if (obj >= res.objective) break;
        res.objective = obj;
        res.solution = theta;
      }
    }
  };

  DescentResult res;
  res.solution = Eigen::VectorXd::Zero(n);
  res.objective = value(res.solution);
  res.evaluations = 1;
  const int rounds = 5;
  double leg_step = step0;
  for (int round = 0; round < rounds; ++round) {
    const long leg_budget = std::max(2L, (budget - res.evaluations) / (rounds - round));
    DescentResult leg = descend_leg(res.solution, value, direction, leg_budget, leg_step);
    res.evaluations += leg.evaluations;
    res.final_step = leg.final_step;
    if (leg.objective < res.objective) {
      res.objective = leg.objective;
      res.solution = std::move(leg.solution);
    }
    polish(res);
    leg_step = std::max(leg_step * 0.04, 1e-10);
    if (res.evaluations >= budget) break;
  }
  res.fitted = gram * res.solution;
  return res;
}

DescentResult linear_primal_descent(const Eigen::MatrixXd& x_aug, const Eigen::VectorXd& y,
                                    double lambda1, double c_upper, double epsilon, long budget,
                                    double step0) {
  const Eigen::Index n = x_aug.rows();
  const Eigen::Index dim = x_aug.cols();
  if (y.size() != n) throw std::invalid_argument("linear_primal_descent: shape mismatch");
  const double scale = 2.0 * lambda1 / static_cast<double>(n);

  const auto value = [&](const Eigen::VectorXd& w) {
    return linear_primal_objective(x_aug, y, lambda1, c_upper, epsilon, w);
  };
  const auto direction = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd fitted = x_aug * w;
    Eigen::VectorXd pull = scale * (fitted - y);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = fitted(i) - y(i);
      if (r > epsilon)
        pull(i) += c_upper;
      else if (r < -epsilon)
        pull(i) -= c_upper;
    }
    return Eigen::VectorXd(w + x_aug.transpose() * pull);
  };
  // Same polish as the kernel path, in weight space: quadratic block
  // I + scale X~'X~, hinge linear term C X~' slope, boundary rows x~_i.
  const auto polish = [&](DescentResult& res) {
    Eigen::MatrixXd quad = scale * (x_aug.transpose() * x_aug);
    quad.diagonal().array() += 1.0;
    for (double band : kPolishBands) {
      for (int pass = 0; pass < 3; ++pass) {
        FaceSplit split = classify_face(x_aug * res.solution, y, epsilon, band);
        const auto e = static_cast<Eigen::Index>(split.edge.size());
        Eigen::MatrixXd cons(e, dim);
        for (Eigen::Index k = 0; k < e; ++k)
          cons.row(k) = x_aug.row(split.edge[static_cast<std::size_t>(k)]);
        Eigen::VectorXd rhs = x_aug.transpose() * (scale * y - c_upper * split.slope);
        Eigen::VectorXd w = solve_face(quad, rhs, cons, split.boundary.head(e));
        if (!w.allFinite()) break;
        const double obj = value(w);
        res.evaluations += 1;
        if (obj >= res.objective) break;
        res.objective = obj;
        res.solution = w;
      }
    }
  };

  DescentResult res;
  res.solution = Eigen::VectorXd::Zero(dim);
  res.objective = value(res.solution);
  res.evaluations = 1;
  const int rounds = 5;
  double leg_step = step0;
  for (int round = 0; round < rounds; ++round) {
    const long leg_budget = std::max(2L, (budget - res.evaluations) / (rounds - round));
    DescentResult leg = descend_leg(res.solution, value, direction, leg_budget, leg_step);
    res.evaluations += leg.evaluations;
    res.final_step = leg.final_step;
    if (leg.objective < res.objective) {
      res.objective = leg.objective;
      res.solution = std::move(leg.solution);
    }
    polish(res);
    leg_step = std::max(leg_step * 0.04, 1e-10);
    if (res.evaluations >= budget) break;
  }
  res.fitted = x_aug * res.solution;
  return res;
}

double finite_diff_max_dev(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& grad, const Eigen::VectorXd& point, double step) {
  if (grad.size() != point.size())
    throw std::invalid_argument("finite_diff_max_dev: size mismatch");
  if (!(step > 0)) throw std::invalid_argument("finite_diff_max_dev: step must be positive");
  double max_dev = 0.0;
  Eigen::VectorXd probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe(i) = point(i) + step;
    const double hi = f(probe);
    probe(i) = point(i) - step;
    const double lo = f(probe);
    probe(i) = point(i);
    max_dev = std::max(max_dev, std::abs((hi - lo) / (2.0 * step) - grad(i)));
  }
  return max_dev / std::max(grad.lpNorm<Eigen::Infinity>(), 1.0);
}

}  // namespace edwsvr::oracle
