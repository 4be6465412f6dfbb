#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edwsvr/pipeline.hpp"

namespace edwsvr {

// Candidate values for hyperparameter search. An empty list keeps the
// method's base value for that parameter; search runs only when at least one
// list is nonempty, and selects on a validation split carved from each
// training fold, never on the test fold.
struct GridSpec {
  std::vector<double> c_values;
  std::vector<double> epsilon_values;
  std::vector<double> gamma_values;  // consulted by rbf-kernel methods only

  bool empty() const { return c_values.empty() && epsilon_values.empty() && gamma_values.empty(); }
};

// A report column: label plus the training recipe behind it.
struct MethodSpec {
  std::string name;
  TrainSpec train;
};

// Method tokens: cd-rbf, cd-linear, esvr-rbf, esvr-linear, asgd, ols;
// bare "cd" and "esvr" mean the rbf variant. Throws std::invalid_argument
// on anything else.
MethodSpec make_method(const std::string& token);

struct CvOptions {
  int folds = 5;
  int repeats = 30;
  std::uint64_t seed = 0;
  GridSpec grid;
};

struct MethodReport {
  std::string method;
  long entries = 0;  // folds x repeats evaluations aggregated
  double mse_mean = 0.0, mse_sd = 0.0;
  long r2_entries = 0;  // evaluations where r2 was defined
  double r2_mean = 0.0, r2_sd = 0.0;
  double seconds_per_fit = 0.0;  // final per-fold fits only, search excluded
};

struct BenchReport {
  std::string dataset;
  int folds = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::vector<MethodReport> methods;
};

// Fold plans are reseeded per repeat (seed + repeat), preprocessing is fit on
// each training split only, and metrics aggregate all folds x repeats entries
// with the sample standard deviation.
BenchReport run_cv(const Dataset& data, const std::string& dataset_name,
                   const std::vector<MethodSpec>& methods, const CvOptions& options);

// Machine-readable form: '#'-prefixed comments, then one
// "dataset method metric mean sd n" record per metric. Timing is excluded,
// so identical seeds yield byte-identical files.
void write_report(const BenchReport& report, const std::string& path);

// Human-readable table, including seconds per fit.
void print_report(const BenchReport& report, std::ostream& out);

}  // namespace edwsvr
