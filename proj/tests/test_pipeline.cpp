#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "edwsvr/metrics.hpp"
#include "edwsvr/pipeline.hpp"
#include "edwsvr/rng.hpp"

using namespace edwsvr;

namespace {

// Features on wildly different scales; normalization has to absorb them.
Dataset scaled_dataset(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.features.resize(n, 3);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.features(i, 0) = 1000.0 * rng.unit();
    data.features(i, 1) = rng.unit();
    data.features(i, 2) = 0.001 * rng.unit();
    data.targets(i) = 0.002 * data.features(i, 0) + data.features(i, 1) +
                      500.0 * data.features(i, 2) + 0.01 * rng.gaussian();
  }
  return data;
}

}  // namespace

TEST_CASE("every solver trains through the pipeline and predicts in raw units") {
  Dataset data = scaled_dataset(80, 41);
  for (SolverKind solver :
       {SolverKind::cd, SolverKind::esvr, SolverKind::asgd, SolverKind::ols}) {
    TrainSpec spec;
    spec.solver = solver;
    spec.kernel.kind =
        (solver == SolverKind::cd || solver == SolverKind::esvr) ? KernelSpec::Kind::rbf
                                                                 : KernelSpec::Kind::linear;
    spec.asgd.passes = 40;
    Model model = train_model(data, spec);
    Eigen::VectorXd fitted = predict_many(model, data.features);
    Metrics metrics = evaluate(fitted, data.targets);
    CHECK(std::isfinite(metrics.mse));
    REQUIRE(metrics.r2.has_value());
    CHECK(*metrics.r2 > 0.8);  // raw-unit predictions track raw-unit targets
    CHECK(model_input_dim(model) == 3);
  }
}

TEST_CASE("an unset rbf width resolves to one over the trained dimension") {
  Dataset data = scaled_dataset(40, 42);
  TrainSpec spec;
  spec.solver = SolverKind::cd;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  spec.kernel.gamma = -1.0;
  Model model = train_model(data, spec);
  CHECK(std::get<cd::DualModel>(model).spec.gamma == doctest::Approx(1.0 / 3.0));

  spec.pca_variance = 1.0;  // keeps every component, dimension unchanged
  Model with_pca = train_model(data, spec);
  CHECK(std::get<cd::DualModel>(with_pca).spec.gamma == doctest::Approx(1.0 / 3.0));

  spec.pca_variance.reset();
  spec.kernel.gamma = 2.5;  // explicit width wins
  Model fixed = train_model(data, spec);
  CHECK(std::get<cd::DualModel>(fixed).spec.gamma == 2.5);
}

TEST_CASE("pca reduces the space the kernel sees but not the query dimension") {
  Rng rng(43);
  Dataset data;
  data.features.resize(60, 4);
  data.targets.resize(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    const double t = rng.unit();
    // Rank-one features plus a touch of noise: one component dominates.
    for (Eigen::Index j = 0; j < 4; ++j)
      data.features(i, j) = t * static_cast<double>(j + 1) + 1e-4 * rng.gaussian();
    data.targets(i) = 3.0 * t + 0.01 * rng.gaussian();
  }
  TrainSpec spec;
  spec.solver = SolverKind::cd;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  spec.pca_variance = 0.95;
  Model model = train_model(data, spec);

  const auto& dual = std::get<cd::DualModel>(model);
  REQUIRE(dual.support_points.rows() > 0);
  CHECK(dual.support_points.cols() == 1);  // one dominant direction survives
  CHECK(model_input_dim(model) == 4);      // queries still arrive in raw space
  CHECK(dual.spec.gamma == doctest::Approx(1.0));

  Eigen::VectorXd fitted = predict_many(model, data.features);
  Metrics metrics = evaluate(fitted, data.targets);
  REQUIRE(metrics.r2.has_value());
  CHECK(*metrics.r2 > 0.9);
}

TEST_CASE("the averaged-gradient solver refuses an rbf kernel") {
  Dataset data = scaled_dataset(20, 44);
  TrainSpec spec;
  spec.solver = SolverKind::asgd;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  CHECK_THROWS_AS(train_model(data, spec), std::invalid_argument);
}

TEST_CASE("prediction rejects queries of the wrong dimension") {
  Dataset data = scaled_dataset(20, 45);
  TrainSpec spec;
  spec.solver = SolverKind::ols;
  Model model = train_model(data, spec);
  Eigen::VectorXd bad(5);
  bad.setZero();
  CHECK_THROWS_AS(predict_one(model, bad), std::invalid_argument);
}

TEST_CASE("normalization can be turned off") {
  Dataset data = scaled_dataset(30, 46);
  TrainSpec spec;
  spec.solver = SolverKind::ols;
  spec.normalize = false;
  Model model = train_model(data, spec);
  const Preprocessing& prep = model_preprocessing(model);
  Eigen::VectorXd probe = data.features.row(0).transpose();
  CHECK((prep.transform(probe).array() == probe.array()).all());  // identity feature map
}
