#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "edwsvr/cv.hpp"
#include "edwsvr/rng.hpp"
#include "edwsvr/synth.hpp"
#include "test_util.hpp"

using namespace edwsvr;

namespace {

Dataset small_regression(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  data.features.resize(n, 2);
  data.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.features(i, 0) = rng.unit();
    data.features(i, 1) = rng.unit();
    data.targets(i) =
        1.5 * data.features(i, 0) - 0.5 * data.features(i, 1) + 0.02 * rng.gaussian();
  }
  return data;
}

}  // namespace

TEST_CASE("method tokens expand to the expected recipes") {
  MethodSpec cd = make_method("cd");
  CHECK(cd.name == "cd-rbf");
  CHECK(cd.train.solver == SolverKind::cd);
  CHECK(cd.train.kernel.kind == KernelSpec::Kind::rbf);

  CHECK(make_method("cd-rbf").name == "cd-rbf");
  CHECK(make_method("cd-linear").train.kernel.kind == KernelSpec::Kind::linear);
  CHECK(make_method("esvr").name == "esvr-rbf");
  CHECK(make_method("esvr-linear").train.solver == SolverKind::esvr);

  MethodSpec asgd = make_method("asgd");
  CHECK(asgd.train.solver == SolverKind::asgd);
  CHECK(asgd.train.kernel.kind == KernelSpec::Kind::linear);

  CHECK(make_method("ols").train.solver == SolverKind::ols);
  CHECK_THROWS_AS(make_method("boost"), std::invalid_argument);
  CHECK_THROWS_AS(make_method(""), std::invalid_argument);
}

TEST_CASE("run_cv aggregates folds times repeats entries per method") {
  Dataset data = small_regression(60, 31);
  CvOptions options;
  options.folds = 3;
  options.repeats = 2;
  options.seed = 7;
  BenchReport report = run_cv(data, "toy", {make_method("ols"), make_method("asgd")}, options);

  CHECK(report.dataset == "toy");
  CHECK(report.methods.size() == 2);
  for (const auto& m : report.methods) {
    CHECK(m.entries == 6);
    CHECK(std::isfinite(m.mse_mean));
    CHECK(m.mse_mean >= 0.0);
    CHECK(m.mse_sd >= 0.0);
    CHECK(m.r2_entries == 6);  // targets vary in every split of this data
    CHECK(m.r2_mean <= 1.0);
    CHECK(m.seconds_per_fit >= 0.0);
  }
  // OLS nails a nearly linear relationship.
  CHECK(report.methods[0].method == "ols");
  CHECK(report.methods[0].r2_mean > 0.9);
}

TEST_CASE("the same seed reproduces the report exactly") {
  Dataset data = small_regression(40, 32);
  CvOptions options;
  options.folds = 4;
  options.repeats = 2;
  options.seed = 11;
  std::vector<MethodSpec> methods = {make_method("cd-linear"), make_method("ols")};
  BenchReport a = run_cv(data, "toy", methods, options);
  BenchReport b = run_cv(data, "toy", methods, options);

  const auto pa = (testutil::scratch_dir() / "report_a.txt").string();
  const auto pb = (testutil::scratch_dir() / "report_b.txt").string();
  write_report(a, pa);
  write_report(b, pb);
  CHECK(testutil::read_file(pa) == testutil::read_file(pb));
  CHECK(testutil::read_file(pa).rfind("# edwsvr-cv v1\n", 0) == 0);

  options.seed = 12;
  BenchReport c = run_cv(data, "toy", methods, options);
  bool all_equal = true;
  for (std::size_t m = 0; m < methods.size(); ++m)
    all_equal = all_equal && a.methods[m].mse_mean == c.methods[m].mse_mean;
  CHECK_FALSE(all_equal);  // different folds, different numbers
}

TEST_CASE("grid search settles on the candidate a fixed run would use") {
  Dataset data = small_regression(50, 33);
  std::vector<MethodSpec> methods = {make_method("esvr-linear")};

  CvOptions fixed;
  fixed.folds = 5;
  fixed.repeats = 1;
  fixed.seed = 3;
  BenchReport good = run_cv(data, "toy", methods, fixed);

  // A starved C underfits badly; the search must reject it in favor of the base value.
  CvOptions searched = fixed;
  searched.grid.c_values = {1e-7, 1.0};
  BenchReport picked = run_cv(data, "toy", methods, searched);
  CHECK(picked.methods[0].mse_mean == good.methods[0].mse_mean);

  std::vector<MethodSpec> starved = {make_method("esvr-linear")};
  starved[0].train.esvr.c_upper = 1e-7;
  BenchReport bad = run_cv(data, "toy", starved, fixed);
  CHECK(bad.methods[0].mse_mean > 5.0 * picked.methods[0].mse_mean);
}

TEST_CASE("report records carry the aggregate counts") {
  Dataset data = small_regression(30, 34);
  CvOptions options;
  options.folds = 3;
  options.repeats = 2;
  BenchReport report = run_cv(data, "named", {make_method("ols")}, options);
  const auto path = (testutil::scratch_dir() / "records.txt").string();
  write_report(report, path);
  const std::string text = testutil::read_file(path);
  CHECK(text.find("named ols mse ") != std::string::npos);
  CHECK(text.find("named ols r2 ") != std::string::npos);
  CHECK(text.find(" 6\n") != std::string::npos);  // entry count terminates each record
  CHECK(text.find("# folds 3 repeats 2 seed 0\n") != std::string::npos);

  std::ostringstream table;
  print_report(report, table);
  CHECK(table.str().find("ols") != std::string::npos);
  CHECK(table.str().find("sec/fit") != std::string::npos);
}

TEST_CASE("invalid cv setups are rejected") {
  Dataset data = small_regression(10, 35);
  CvOptions options;
  options.folds = 12;  // more folds than rows
  CHECK_THROWS_AS(run_cv(data, "toy", {make_method("ols")}, options), std::invalid_argument);
  options.folds = 0;
  CHECK_THROWS_AS(run_cv(data, "toy", {make_method("ols")}, options), std::invalid_argument);
  options.folds = 2;
  options.repeats = 0;
  CHECK_THROWS_AS(run_cv(data, "toy", {make_method("ols")}, options), std::invalid_argument);
  options.repeats = 1;
  CHECK_THROWS_AS(run_cv(data, "toy", {}, options), std::invalid_argument);
}
