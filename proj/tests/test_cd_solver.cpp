#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "edwsvr/cd_solver.hpp"
#include "edwsvr/oracle.hpp"
#include "edwsvr/rng.hpp"

using namespace edwsvr;

namespace {

Dataset random_dataset(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.features.resize(n, d);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = rng.unit();
    data.targets(i) = rng.unit();
  }
  return data;
}

GramMatrix tiny_gram() {
  GramMatrix gram;
  gram.values.resize(2, 2);
  gram.values << 2, 1, 1, 2;
  gram.spec.kind = KernelSpec::Kind::linear;
  return gram;
}

// Box QP formulation of the same dual, solved by the independent oracle:
// x = [beta; beta*], M = [[H, -H], [-H, H]],
// q = [(2l/n) H y - y + eps; -(2l/n) H y + y + eps].
std::pair<Eigen::MatrixXd, Eigen::VectorXd> dual_as_box_qp(const cd::PrecomputedDual& pre,
                                                           const Eigen::VectorXd& y,
                                                           const cd::CdConfig& cfg) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = pre.H;
  m.bottomRightCorner(n, n) = pre.H;
  m.topRightCorner(n, n) = -pre.H;
  m.bottomLeftCorner(n, n) = -pre.H;
  Eigen::VectorXd hy = (2.0 * cfg.lambda1 / static_cast<double>(n)) * (pre.H * y);
  Eigen::VectorXd q(2 * n);
  q.head(n) = hy - y;
  q.tail(n) = -hy + y;
  q.array() += cfg.epsilon;
  return {m, q};
}

}  // namespace

TEST_CASE("precompute with lambda1 = 0 and no ridge gives A = I, H = G") {
  cd::CdConfig cfg;
  cfg.lambda1 = 0.0;
  cfg.ridge = 0.0;
  cd::PrecomputedDual pre = cd::precompute(tiny_gram(), cfg);
  CHECK((pre.A - Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((pre.H - tiny_gram().values).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(pre.ridge_used == 0.0);
}

TEST_CASE("precompute worked example: G = [[2,1],[1,2]], lambda1 = 1, n = 2") {
  // Q = G^2 + G = [[7,5],[5,7]]; A = Q^{-1} G = [[3/8,-1/8],[-1/8,3/8]];
  // H = G A = [[5/8,1/8],[1/8,5/8]].
  cd::CdConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.ridge = 0.0;
  cd::PrecomputedDual pre = cd::precompute(tiny_gram(), cfg);
  Eigen::MatrixXd expect_a(2, 2), expect_h(2, 2);
  expect_a << 0.375, -0.125, -0.125, 0.375;
  expect_h << 0.625, 0.125, 0.125, 0.625;
  CHECK((pre.A - expect_a).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((pre.H - expect_h).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(pre.h_diag(0) == doctest::Approx(0.625));
}

TEST_CASE("A and H are symmetric because Q is a polynomial in G") {
  Dataset data = random_dataset(20, 3, 41);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::rbf;
  spec.gamma = 0.6;
  cd::CdConfig cfg;
  cfg.lambda1 = 3.0;
  cd::PrecomputedDual pre = cd::precompute(gram_augmented(spec, data), cfg);
  CHECK((pre.A - pre.A.transpose()).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((pre.H - pre.H.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(pre.ridge_used > 0.0);  // automatic ridge engaged
  CHECK((pre.h_diag.array() > 0.0).all());
}

TEST_CASE("explicit ridge is honored exactly; automatic ridge stays small") {
  cd::CdConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.ridge = 0.125;
  cd::PrecomputedDual pre = cd::precompute(tiny_gram(), cfg);
  CHECK(pre.ridge_used == 0.125);

  cfg.ridge = -1.0;
  pre = cd::precompute(tiny_gram(), cfg);
  // trace(Q)/n = 7; first factor 1e-8 should already succeed on this matrix.
  CHECK(pre.ridge_used == doctest::Approx(7e-8));
}

TEST_CASE("init_state starts at beta = 0 with theta = (2l/n) A y") {
  cd::CdConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.ridge = 0.0;
  cd::PrecomputedDual pre = cd::precompute(tiny_gram(), cfg);
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  cd::DualState state = cd::init_state(pre, y, cfg);
  CHECK(state.beta.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(state.beta_star.lpNorm<Eigen::Infinity>() == 0.0);
  Eigen::VectorXd expect = pre.A * y;  // (2*1/2) = 1
  CHECK((state.theta - expect).lpNorm<Eigen::Infinity>() < 1e-14);

  cfg.lambda1 = 0.0;
  pre = cd::precompute(tiny_gram(), cfg);
  state = cd::init_state(pre, y, cfg);
  CHECK(state.theta.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("cd_gradient splits the tube: eps + r below n, eps - r above") {
  Eigen::MatrixXd gram = tiny_gram().values;
  Eigen::VectorXd theta(2), y(2);
  theta << 0.5, -0.25;
  y << 0.2, 0.1;
  const double eps = 0.1;
  // fitted = G theta = (0.75, 0.0); residuals r = (0.55, -0.1)
  CHECK(cd::cd_gradient(0, theta, gram, y, eps) == doctest::Approx(0.1 + 0.55));
  CHECK(cd::cd_gradient(1, theta, gram, y, eps) == doctest::Approx(0.1 - 0.1));
  CHECK(cd::cd_gradient(2, theta, gram, y, eps) == doctest::Approx(0.1 - 0.55));
  CHECK(cd::cd_gradient(3, theta, gram, y, eps) == doctest::Approx(0.1 + 0.1));
  CHECK_THROWS_AS(cd::cd_gradient(4, theta, gram, y, eps), std::invalid_argument);
  CHECK_THROWS_AS(cd::cd_gradient(-1, theta, gram, y, eps), std::invalid_argument);
}

TEST_CASE("every coordinate update keeps theta consistent and never raises the dual") {
  Dataset data = random_dataset(15, 2, 42);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::rbf;
  spec.gamma = 1.0;
  cd::CdConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.c_upper = 0.8;
  cfg.epsilon = 0.05;
  cfg.max_sweeps = 60;

  cd::PrecomputedDual pre = cd::precompute(gram_augmented(spec, data), cfg);
  const Eigen::VectorXd init_offset =
      (2.0 * cfg.lambda1 / static_cast<double>(data.n())) * (pre.A * data.targets);

  double last = std::numeric_limits<double>::infinity();
  long checks = 0;
  cd::CdCallback watch = [&](Eigen::Index, const cd::DualState& state, double) {
    CHECK((state.beta.array() >= 0.0).all());
    CHECK((state.beta.array() <= cfg.c_upper).all());
    CHECK((state.beta_star.array() >= 0.0).all());
    CHECK((state.beta_star.array() <= cfg.c_upper).all());
    const double obj = cd::dual_objective(pre, data.targets, cfg, state);
    CHECK(obj <= last + 1e-12);
    last = obj;
    if (++checks % 10 == 0) {
      Eigen::VectorXd direct = pre.A * (state.beta - state.beta_star) + init_offset;
      CHECK((state.theta - direct).lpNorm<Eigen::Infinity>() < 1e-10);
    }
  };
  cd::train_cd(data, spec, cfg, watch);
  CHECK(checks > 0);
}

TEST_CASE("train_cd reaches the box QP optimum found by the oracle") {
  for (std::uint64_t seed : {7ull, 8ull}) {
    Dataset data = random_dataset(12, 2, seed);
    KernelSpec spec;
    spec.kind = seed % 2 == 0 ? KernelSpec::Kind::rbf : KernelSpec::Kind::linear;
    spec.gamma = 0.9;
    cd::CdConfig cfg;
    cfg.lambda1 = 2.0;
    cfg.c_upper = 1.0;
    cfg.epsilon = 0.02;
    cfg.tol = 1e-12;
    cfg.max_sweeps = 20000;

    cd::PrecomputedDual pre = cd::precompute(gram_augmented(spec, data), cfg);
    cd::DualState state = cd::init_state(pre, data.targets, cfg);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      double max_delta = 0.0;
      for (Eigen::Index k = 0; k < 2 * data.n(); ++k)
        max_delta = std::max(max_delta, std::abs(cd::cd_update(k, state, pre, data.targets, cfg)));
      if (max_delta < cfg.tol) break;
    }

    auto [m, q] = dual_as_box_qp(pre, data.targets, cfg);
    oracle::BoxQpResult ref = oracle::solve_box_qp(m, q, cfg.c_upper, 500000, 1e-13);

    const double cd_obj = cd::dual_objective(pre, data.targets, cfg, state);
    CHECK(cd_obj <= ref.objective + 1e-8);
    CHECK(cd_obj >= ref.objective - 1e-8);

    // Optimal fitted values are unique even when the objective is flat in delta.
    const double scale = 2.0 * cfg.lambda1 / static_cast<double>(data.n());
    Eigen::VectorXd fitted_cd = pre.gram.values * state.theta;
    Eigen::VectorXd fitted_ref =
        pre.H * (ref.x.head(data.n()) - ref.x.tail(data.n())) + scale * (pre.H * data.targets);
    CHECK((fitted_cd - fitted_ref).lpNorm<Eigen::Infinity>() < 1e-5);
  }
}

TEST_CASE("train_cd predictions match the primal oracle on a small instance") {
  Dataset data = random_dataset(10, 2, 19);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::rbf;
  spec.gamma = 1.1;
  cd::CdConfig cfg;
  cfg.lambda1 = 1.0;
  cfg.c_upper = 1.0;
  cfg.epsilon = 0.05;
  cfg.tol = 1e-10;
  cfg.max_sweeps = 20000;

  cd::DualModel model = cd::train_cd(data, spec, cfg);
  Eigen::VectorXd fitted = cd::predict_dual_batch(model, data.features);

  Eigen::MatrixXd gram = gram_augmented(spec, data).values;
  oracle::AdmmResult primal = oracle::minimize_kernel_primal(gram, data.targets, cfg.lambda1,
                                                             cfg.c_upper, cfg.epsilon);
  CHECK((fitted - primal.fitted).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("C = 0 pins the box, so theta keeps its closed-form initial value") {
  Dataset data = random_dataset(9, 2, 23);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::linear;
  cd::CdConfig cfg;
  cfg.lambda1 = 1.5;
  cfg.c_upper = 0.0;

  cd::PrecomputedDual pre = cd::precompute(gram_augmented(spec, data), cfg);
  Eigen::VectorXd expect =
      (2.0 * cfg.lambda1 / static_cast<double>(data.n())) * (pre.A * data.targets);

  cd::DualModel model = cd::train_cd(data, spec, cfg);
  Eigen::VectorXd fitted = cd::predict_dual_batch(model, data.features);
  CHECK((fitted - pre.gram.values * expect).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("predict_dual_batch agrees with one-at-a-time prediction") {
  Dataset data = random_dataset(11, 3, 29);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::rbf;
  spec.gamma = 0.4;
  cd::CdConfig cfg;
  cd::DualModel model = cd::train_cd(data, spec, cfg);

  Dataset queries = random_dataset(5, 3, 30);
  Eigen::VectorXd batch = cd::predict_dual_batch(model, queries.features);
  for (Eigen::Index i = 0; i < 5; ++i)
    CHECK(batch(i) == cd::predict_dual(model, queries.features.row(i).transpose()));
}

TEST_CASE("slack diagnostics measure distance outside the tube") {
  Dataset data = random_dataset(13, 2, 31);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::linear;
  cd::CdConfig cfg;
  cfg.epsilon = 0.08;
  cd::DualModel model = cd::train_cd(data, spec, cfg);

  auto [xi, xi_star] = cd::slack_diagnostics(model, data, cfg.epsilon);
  Eigen::VectorXd fitted = cd::predict_dual_batch(model, data.features);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    CHECK(xi(i) >= 0.0);
    CHECK(xi_star(i) >= 0.0);
    const double under = data.targets(i) - fitted(i) - cfg.epsilon;
    const double over = fitted(i) - data.targets(i) - cfg.epsilon;
    CHECK(xi(i) == doctest::Approx(std::max(0.0, under)).epsilon(1e-10));
    CHECK(xi_star(i) == doctest::Approx(std::max(0.0, over)).epsilon(1e-10));
    CHECK(xi(i) * xi_star(i) == doctest::Approx(0.0));  // can't be out both sides
  }
}

TEST_CASE("configuration errors are rejected up front") {
  Dataset data = random_dataset(5, 1, 37);
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::linear;
  cd::CdConfig cfg;
  cfg.c_upper = -1.0;
  CHECK_THROWS_AS(cd::train_cd(data, spec, cfg), std::invalid_argument);
  cfg = {};
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(cd::train_cd(data, spec, cfg), std::invalid_argument);
  cfg = {};
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cd::train_cd(data, spec, cfg), std::invalid_argument);
  cfg = {};
  cfg.lambda1 = -2.0;
  CHECK_THROWS_AS(cd::train_cd(data, spec, cfg), std::invalid_argument);
}
