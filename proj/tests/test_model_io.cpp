#include <doctest.h>

#include <Eigen/Dense>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "edwsvr/model_io.hpp"
#include "edwsvr/rng.hpp"
#include "edwsvr/synth.hpp"
#include "test_util.hpp"

using namespace edwsvr;

namespace {

Dataset random_dataset(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.features.resize(n, d);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = 10.0 * rng.unit() - 3.0;
    data.targets(i) = 4.0 * rng.unit() + data.features(i, 0);
  }
  return data;
}

Eigen::MatrixXd random_queries(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd q(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) q(i, j) = 12.0 * rng.unit() - 4.0;
  return q;
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void check_roundtrip(const Model& model, Eigen::Index dim, const std::string& name) {
  const std::string path = (testutil::scratch_dir() / name).string();
  save_model(path, model);
  Model loaded = load_model(path);
  Eigen::MatrixXd queries = random_queries(25, dim, 901);
  CHECK(same_bits(predict_many(model, queries), predict_many(loaded, queries)));

  // A second save of the loaded model reproduces the file byte for byte.
  const std::string path2 = path + ".again";
  save_model(path2, loaded);
  CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

}  // namespace

TEST_CASE("dual rbf model with normalization and pca round trips bitwise") {
  Dataset data = random_dataset(35, 4, 91);
  TrainSpec spec;
  spec.solver = SolverKind::cd;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  spec.kernel.gamma = -1.0;  // resolved from the data
  spec.pca_variance = 0.99;
  Model model = train_model(data, spec);
  check_roundtrip(model, data.dim(), "dual_rbf.model");
}

TEST_CASE("dual linear model without normalization round trips bitwise") {
  Dataset data = random_dataset(20, 3, 92);
  TrainSpec spec;
  spec.solver = SolverKind::esvr;
  spec.kernel.kind = KernelSpec::Kind::linear;
  spec.normalize = false;
  Model model = train_model(data, spec);
  check_roundtrip(model, data.dim(), "dual_linear.model");
}

TEST_CASE("linear and ols models round trip bitwise") {
  Dataset data = random_dataset(30, 3, 93);
  TrainSpec spec;
  spec.solver = SolverKind::asgd;
  spec.kernel.kind = KernelSpec::Kind::linear;
  spec.asgd.passes = 10;
  check_roundtrip(train_model(data, spec), data.dim(), "asgd.model");

  spec = {};
  spec.solver = SolverKind::ols;
  spec.kernel.kind = KernelSpec::Kind::linear;
  check_roundtrip(train_model(data, spec), data.dim(), "ols.model");
}

TEST_CASE("a model with no support points round trips") {
  Dataset data = random_dataset(10, 2, 94);
  data.targets.setZero();  // everything inside the tube, dual stays at zero
  TrainSpec spec;
  spec.solver = SolverKind::esvr;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  spec.kernel.gamma = 1.0;
  spec.normalize = false;
  spec.esvr.epsilon = 0.5;
  Model model = train_model(data, spec);
  CHECK(std::get<cd::DualModel>(model).theta.size() == 0);
  check_roundtrip(model, data.dim(), "empty_support.model");
}

TEST_CASE("the file starts with the version tag") {
  Dataset data = random_dataset(8, 2, 95);
  TrainSpec spec;
  spec.solver = SolverKind::ols;
  Model model = train_model(data, spec);
  const std::string path = (testutil::scratch_dir() / "tagged.model").string();
  save_model(path, model);
  const std::string text = testutil::read_file(path);
  CHECK(text.rfind("edwsvr-model v1\n", 0) == 0);
  CHECK(text.find("kind ols\n") != std::string::npos);
}

TEST_CASE("unknown versions and kinds are rejected") {
  const auto dir = testutil::scratch_dir();
  const std::string v2 = testutil::write_file("bad_version.model", "edwsvr-model v2\nkind ols\n");
  CHECK_THROWS_AS(load_model(v2), std::runtime_error);
  const std::string kind = testutil::write_file(
      "bad_kind.model", "edwsvr-model v1\nkind tree\n");
  CHECK_THROWS_AS(load_model(kind), std::runtime_error);
}

TEST_CASE("truncated and malformed files name the offending line") {
  Dataset data = random_dataset(8, 2, 96);
  TrainSpec spec;
  spec.solver = SolverKind::cd;
  spec.kernel.kind = KernelSpec::Kind::rbf;
  spec.kernel.gamma = 0.5;
  Model model = train_model(data, spec);
  const std::string path = (testutil::scratch_dir() / "whole.model").string();
  save_model(path, model);
  std::string text = testutil::read_file(path);

  // Drop the trailing "end" line and everything after the support header.
  const auto support_pos = text.find("support ");
  REQUIRE(support_pos != std::string::npos);
  const auto line_end = text.find('\n', support_pos);
  const std::string truncated_text = text.substr(0, line_end + 1);
  const std::string truncated = testutil::write_file("truncated.model", truncated_text);
  CHECK_THROWS_WITH_AS(load_model(truncated), doctest::Contains("truncated.model"),
                       std::runtime_error);

  const std::string garbled = testutil::write_file(
      "garbled.model", "edwsvr-model v1\nkind dual\nnorm nope\n");
  CHECK_THROWS_WITH_AS(load_model(garbled), doctest::Contains(":3"), std::runtime_error);

  CHECK_THROWS_AS(load_model((testutil::scratch_dir() / "missing.model").string()),
                  std::runtime_error);
}
