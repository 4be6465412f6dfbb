#include "edwsvr/cv.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "edwsvr/folds.hpp"
#include "edwsvr/metrics.hpp"
#include "edwsvr/textio.hpp"

namespace edwsvr {

namespace {

bool uses_gamma(const TrainSpec& t) {
  return (t.solver == SolverKind::cd || t.solver == SolverKind::esvr) &&
         t.kernel.kind == KernelSpec::Kind::rbf;
}

void set_c(TrainSpec& t, double c) {
  switch (t.solver) {
    case SolverKind::cd: t.cd.c_upper = c; break;
    case SolverKind::esvr: t.esvr.c_upper = c; break;
    case SolverKind::asgd: t.asgd.c_upper = c; break;
    case SolverKind::ols: break;
  }
}

void set_epsilon(TrainSpec& t, double e) {
  switch (t.solver) {
    case SolverKind::cd: t.cd.epsilon = e; break;
    case SolverKind::esvr: t.esvr.epsilon = e; break;
    case SolverKind::asgd: t.asgd.epsilon = e; break;
    case SolverKind::ols: break;
  }
}

std::vector<TrainSpec> grid_candidates(const TrainSpec& base, const GridSpec& grid) {
  if (base.solver == SolverKind::ols) return {base};
  const bool gamma_applies = uses_gamma(base) && !grid.gamma_values.empty();
  if (grid.c_values.empty() && grid.epsilon_values.empty() && !gamma_applies) return {base};

  const std::vector<double> keep = {std::numeric_limits<double>::quiet_NaN()};
  const auto& cs = grid.c_values.empty() ? keep : grid.c_values;
  const auto& es = grid.epsilon_values.empty() ? keep : grid.epsilon_values;
  const auto& gs = gamma_applies ? grid.gamma_values : keep;

  std::vector<TrainSpec> out;
  for (double c : cs)
    for (double e : es)
      for (double g : gs) {
        TrainSpec spec = base;
        if (!std::isnan(c)) set_c(spec, c);
        if (!std::isnan(e)) set_epsilon(spec, e);
        if (!std::isnan(g)) spec.kernel.gamma = g;
        out.push_back(spec);
      }
  return out;
}

// Picks the candidate with the lowest MSE on one validation split carved out
// of the training fold; first candidate wins ties.
TrainSpec select_candidate(const Dataset& train, const std::vector<TrainSpec>& candidates,
                           std::uint64_t seed) {
  if (candidates.size() == 1 || train.n() < 4) return candidates.front();
  const int inner_k = train.n() >= 5 ? 5 : 2;
  FoldPlan inner = make_folds(static_cast<std::size_t>(train.n()), inner_k, seed);
  Dataset fit = subset(train, inner.complement_indices(0));
  Dataset val = subset(train, inner.fold_indices(0));

  const TrainSpec* best = &candidates.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (const TrainSpec& cand : candidates) {
    Model model = train_model(fit, cand);
    const double mse = evaluate(predict_many(model, val.features), val.targets).mse;
    if (mse < best_mse) {
      best_mse = mse;
      best = &cand;
    }
  }
  return *best;
}

struct Accumulator {
  std::vector<double> mse, r2;
  double fit_seconds = 0.0;
  long fits = 0;
};

std::pair<double, double> mean_sd(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace

MethodSpec make_method(const std::string& token) {
  MethodSpec m;
  m.name = token;
  TrainSpec& t = m.train;
  const auto rbf_auto = [] {
    KernelSpec k;
    k.kind = KernelSpec::Kind::rbf;
    k.gamma = -1.0;  // resolved to 1/dim at fit time
    return k;
  };
  if (token == "cd" || token == "cd-rbf") {
    t.solver = SolverKind::cd;
    t.kernel = rbf_auto();
    if (token == "cd") m.name = "cd-rbf";
  } else if (token == "cd-linear") {
    t.solver = SolverKind::cd;
    t.kernel.kind = KernelSpec::Kind::linear;
  } else if (token == "esvr" || token == "esvr-rbf") {
    t.solver = SolverKind::esvr;
    t.kernel = rbf_auto();
    if (token == "esvr") m.name = "esvr-rbf";
  } else if (token == "esvr-linear") {
    t.solver = SolverKind::esvr;
    t.kernel.kind = KernelSpec::Kind::linear;
  } else if (token == "asgd") {
    t.solver = SolverKind::asgd;
    t.kernel.kind = KernelSpec::Kind::linear;
  } else if (token == "ols") {
    t.solver = SolverKind::ols;
  } else {
    throw std::invalid_argument("unknown method '" + token + "'");
  }
  return m;
}

BenchReport run_cv(const Dataset& data, const std::string& dataset_name,
                   const std::vector<MethodSpec>& methods, const CvOptions& options) {
  data.validate();
  if (methods.empty()) throw std::invalid_argument("run_cv: no methods");
  if (options.repeats < 1) throw std::invalid_argument("run_cv: repeats must be positive");
  if (options.folds < 2) throw std::invalid_argument("run_cv: need at least two folds");
  if (data.n() < options.folds)
    throw std::invalid_argument("run_cv: dataset smaller than the fold count");

  std::vector<std::vector<TrainSpec>> candidates;
  candidates.reserve(methods.size());
  for (const MethodSpec& m : methods) candidates.push_back(grid_candidates(m.train, options.grid));

  std::vector<Accumulator> acc(methods.size());
  for (int repeat = 0; repeat < options.repeats; ++repeat) {
    FoldPlan plan = make_folds(static_cast<std::size_t>(data.n()), options.folds,
                               options.seed + static_cast<std::uint64_t>(repeat));
    for (int fold = 0; fold < options.folds; ++fold) {
      Dataset train = subset(data, plan.complement_indices(fold));
      Dataset test = subset(data, plan.fold_indices(fold));
      // One deterministic inner-split seed per (repeat, fold).
      const std::uint64_t inner_seed =
          options.seed + 1000003ull * static_cast<std::uint64_t>(repeat * options.folds + fold + 1);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        TrainSpec chosen = select_candidate(train, candidates[mi], inner_seed);
        const auto start = std::chrono::steady_clock::now();
        Model model = train_model(train, chosen);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        Metrics metrics = evaluate(predict_many(model, test.features), test.targets);
        acc[mi].mse.push_back(metrics.mse);
        if (metrics.r2) acc[mi].r2.push_back(*metrics.r2);
        acc[mi].fit_seconds += elapsed.count();
        acc[mi].fits += 1;
      }
    }
  }

  BenchReport report;
  report.dataset = dataset_name;
  report.folds = options.folds;
  report.repeats = options.repeats;
  report.seed = options.seed;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    MethodReport r;
    r.method = methods[mi].name;
    r.entries = static_cast<long>(acc[mi].mse.size());
    std::tie(r.mse_mean, r.mse_sd) = mean_sd(acc[mi].mse);
    r.r2_entries = static_cast<long>(acc[mi].r2.size());
    std::tie(r.r2_mean, r.r2_sd) = mean_sd(acc[mi].r2);
    r.seconds_per_fit = acc[mi].fits > 0 ? acc[mi].fit_seconds / static_cast<double>(acc[mi].fits) : 0.0;
    report.methods.push_back(std::move(r));
  }
  return report;
}

void write_report(const BenchReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "# edwsvr-cv v1\n";
  out << "# folds " << report.folds << " repeats " << report.repeats << " seed " << report.seed
      << "\n";
  out << "# dataset method metric mean sd n\n";
  for (const MethodReport& m : report.methods) {
    out << report.dataset << ' ' << m.method << " mse " << format_double(m.mse_mean) << ' '
        << format_double(m.mse_sd) << ' ' << m.entries << '\n';
    if (m.r2_entries > 0)
      out << report.dataset << ' ' << m.method << " r2 " << format_double(m.r2_mean) << ' '
          << format_double(m.r2_sd) << ' ' << m.r2_entries << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

void print_report(const BenchReport& report, std::ostream& out) {
  out << "dataset: " << report.dataset << "  folds: " << report.folds
      << "  repeats: " << report.repeats << "  seed: " << report.seed << "\n";
  out << std::left << std::setw(14) << "method" << std::right << std::setw(12) << "mse" << std::setw(12)
      << "mse-sd" << std::setw(12) << "r2" << std::setw(12) << "r2-sd" << std::setw(12) << "sec/fit"
      << "\n";
  const auto cell = [&](double v) {
    out << std::setw(12) << std::setprecision(5) << v;
  };
  for (const MethodReport& m : report.methods) {
    out << std::left << std::setw(14) << m.method << std::right;
    cell(m.mse_mean);
    cell(m.mse_sd);
    if (m.r2_entries > 0) {
      cell(m.r2_mean);
      cell(m.r2_sd);
    } else {
      out << std::setw(12) << "-" << std::setw(12) << "-";
    }
    cell(m.seconds_per_fit);
    out << "\n";
  }
}

}  // namespace edwsvr
