#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "edwsvr/cv.hpp"
#include "edwsvr/metrics.hpp"
#include "edwsvr/model_io.hpp"
#include "edwsvr/pipeline.hpp"
#include "edwsvr/synth.hpp"
#include "edwsvr/textio.hpp"

namespace {

using namespace edwsvr;

DataFormat parse_format(const std::string& token) {
  if (token == "csv") return DataFormat::csv;
  if (token == "sparse") return DataFormat::sparse;
  throw std::invalid_argument("unknown data format '" + token + "' (expected csv or sparse)");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto pos = csv.find(',', start);
    if (pos == std::string::npos) pos = csv.size();
    std::string tok = csv.substr(start, pos - start);
    if (!tok.empty()) out.push_back(tok);
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& tok : split_list(csv)) {
    double v;
    if (!try_parse_double(tok, v)) throw std::invalid_argument(flag + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

struct IoArgs {
  std::string in;
  std::string format = "csv";
  std::string target = "target";

  Dataset load() const { return load_dataset(in, parse_format(format), target); }
};

void add_io_options(CLI::App* cmd, IoArgs& io) {
  cmd->add_option("--in", io.in, "input dataset path")->required();
  cmd->add_option("--format", io.format, "dataset format: csv or sparse");
  cmd->add_option("--target", io.target, "target column (csv): header name, else 0-based index");
}

struct SolverArgs {
  std::string solver = "cd";
  std::string kernel;  // empty means rbf for kernel solvers, linear otherwise
  double gamma = -1.0;
  double lambda1 = 1.0;
  double c_upper = 1.0;
  double epsilon = 0.1;
  int sweeps = 1000;
  double tol = 1e-6;
  double ridge = -1.0;
  int passes = 5;
  double eta0 = 0.1;
  long long t0 = -1;
  std::uint64_t seed = 0;
  double pca_var = 0.0;  // 0 = off
  bool no_normalize = false;

  // with_seed is off for subcommands that claim --seed for another purpose.
  void add_options(CLI::App* cmd, bool with_solver_choice, bool with_seed = true) {
    if (with_solver_choice)
      cmd->add_option("--solver", solver, "cd, esvr, asgd, or ols");
    cmd->add_option("--kernel", kernel, "linear or rbf");
    cmd->add_option("--gamma", gamma, "rbf width; nonpositive means 1/dim after preprocessing");
    cmd->add_option("--lambda1", lambda1, "weight of the mean squared functional margin");
    cmd->add_option("--C", c_upper, "box constraint / slack penalty");
    cmd->add_option("--epsilon", epsilon, "insensitive-tube half width");
    cmd->add_option("--sweeps", sweeps, "coordinate-descent sweep limit");
    cmd->add_option("--tol", tol, "coordinate-descent stop threshold");
    cmd->add_option("--ridge", ridge, "dual system ridge; negative means automatic");
    cmd->add_option("--passes", passes, "gradient solver passes over the data");
    cmd->add_option("--eta0", eta0, "gradient solver initial step");
    cmd->add_option("--t0", t0, "averaging burn-in steps; negative means n");
    if (with_seed) cmd->add_option("--seed", seed, "gradient solver sampling seed");
    cmd->add_option("--pca-var", pca_var, "retained-variance threshold in (0,1]; 0 disables PCA");
    cmd->add_flag("--no-normalize", no_normalize, "skip min-max normalization");
  }

  TrainSpec to_spec() const {
    TrainSpec spec;
    if (solver == "cd")
      spec.solver = SolverKind::cd;
    else if (solver == "esvr")
      spec.solver = SolverKind::esvr;
    else if (solver == "asgd")
      spec.solver = SolverKind::asgd;
    else if (solver == "ols")
      spec.solver = SolverKind::ols;
    else
      throw std::invalid_argument("unknown solver '" + solver + "'");

    std::string k = kernel;
    if (k.empty())
      k = (spec.solver == SolverKind::cd || spec.solver == SolverKind::esvr) ? "rbf" : "linear";
    if (k == "linear")
      spec.kernel.kind = KernelSpec::Kind::linear;
    else if (k == "rbf") {
      spec.kernel.kind = KernelSpec::Kind::rbf;
      spec.kernel.gamma = gamma;
    } else {
      throw std::invalid_argument("unknown kernel '" + k + "'");
    }
    if (spec.solver == SolverKind::asgd && spec.kernel.kind != KernelSpec::Kind::linear)
      throw std::invalid_argument("asgd supports linear only");

    spec.normalize = !no_normalize;
    if (pca_var != 0.0) spec.pca_variance = pca_var;

    spec.cd.lambda1 = lambda1;
    spec.cd.c_upper = c_upper;
    spec.cd.epsilon = epsilon;
    spec.cd.max_sweeps = sweeps;
    spec.cd.tol = tol;
    spec.cd.ridge = ridge;

    spec.esvr.c_upper = c_upper;
    spec.esvr.epsilon = epsilon;
    spec.esvr.max_sweeps = sweeps;
    spec.esvr.tol = tol;

    spec.asgd.lambda1 = lambda1;
    spec.asgd.c_upper = c_upper;
    spec.asgd.epsilon = epsilon;
    spec.asgd.passes = passes;
    spec.asgd.t0 = t0;
    spec.asgd.eta0 = eta0;
    spec.asgd.seed = seed;
    return spec;
  }
};

Eigen::VectorXd load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v;
    if (!try_parse_double(line, v) || !std::isfinite(v))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad prediction '" + line + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::runtime_error(path + ": no predictions");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int cmd_train(const IoArgs& io, const SolverArgs& args, const std::string& out_path) {
  Dataset data = io.load();
  Model model = train_model(data, args.to_spec());
  save_model(out_path, model);
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

int cmd_predict(const IoArgs& io, const std::string& model_path, const std::string& out_path) {
  Model model = load_model(model_path);
  Dataset data = io.load();
  if (data.dim() != model_input_dim(model))
    throw std::invalid_argument("model expects " + std::to_string(model_input_dim(model)) +
                                " features, dataset has " + std::to_string(data.dim()));
  Eigen::VectorXd preds = predict_many(model, data.features);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  for (Eigen::Index i = 0; i < preds.size(); ++i) *out << format_double(preds(i)) << '\n';
  if (!*out) throw std::runtime_error("write failed");
  return 0;
}

int cmd_eval(const IoArgs& io, const std::string& pred_path) {
  Dataset data = io.load();
  Eigen::VectorXd preds = load_predictions(pred_path);
  if (preds.size() != data.n())
    throw std::invalid_argument("prediction count " + std::to_string(preds.size()) +
                                " does not match dataset rows " + std::to_string(data.n()));
  Metrics m = evaluate(preds, data.targets);
  std::cout << "mse " << format_double(m.mse) << "\n";
  if (m.r2)
    std::cout << "r2 " << format_double(*m.r2) << "\n";
  else
    std::cout << "r2 undefined\n";
  return 0;
}

int cmd_cv(const IoArgs& io, const SolverArgs& args, const std::string& methods_csv, int folds,
           int repeats, std::uint64_t seed, const std::string& grid_c, const std::string& grid_eps,
           const std::string& grid_gamma, const std::string& out_path) {
  Dataset data = io.load();

  SolverArgs shared = args;
  shared.seed = seed;  // one seed governs fold shuffling and gradient sampling
  std::vector<MethodSpec> methods;
  for (const std::string& token : split_list(methods_csv)) {
    MethodSpec m = make_method(token);
    // Shared base values; the method token still decides solver and kernel.
    TrainSpec base = shared.to_spec();
    base.kernel = m.train.kernel;
    base.solver = m.train.solver;
    if (base.solver == SolverKind::asgd && base.kernel.kind != KernelSpec::Kind::linear)
      throw std::invalid_argument("asgd supports linear only");
    if (base.kernel.kind == KernelSpec::Kind::rbf) base.kernel.gamma = args.gamma;
    m.train = base;
    methods.push_back(std::move(m));
  }
  if (methods.empty()) throw std::invalid_argument("--methods: empty list");

  CvOptions options;
  options.folds = folds;
  options.repeats = repeats;
  options.seed = seed;
  options.grid.c_values = parse_double_list(grid_c, "--grid-c");
  options.grid.epsilon_values = parse_double_list(grid_eps, "--grid-epsilon");
  options.grid.gamma_values = parse_double_list(grid_gamma, "--grid-gamma");

  const std::string name = std::filesystem::path(io.in).stem().string();
  BenchReport report = run_cv(data, name.empty() ? "dataset" : name, methods, options);
  print_report(report, std::cout);
  if (!out_path.empty()) write_report(report, out_path);
  return 0;
}

int cmd_synth(Eigen::Index n, double frac_a, double frac_b, double frac_out, double offset,
              double noise, std::uint64_t seed, const std::string& out_path) {
  TwoLines lines = synth_two_lines(n, frac_a, frac_b, frac_out, offset, noise, seed);
  save_dataset(lines.data, out_path, DataFormat::csv);
  std::cout << "rows " << lines.data.n() << " line-a " << lines.count_a << " line-b "
            << lines.count_b << " outliers " << lines.count_outlier << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"e-distance-weighted support vector regression toolkit"};
  app.require_subcommand(1);

  IoArgs train_io, predict_io, eval_io, cv_io;
  SolverArgs train_args, cv_args;
  std::string train_out, predict_model, predict_out, eval_pred, cv_out;
  std::string cv_methods = "cd-rbf,cd-linear,esvr,asgd,ols";
  int cv_folds = 5, cv_repeats = 30;
  std::uint64_t cv_seed = 0;
  std::string grid_c, grid_eps, grid_gamma;
  Eigen::Index synth_n = 1000;
  double synth_frac_a = 0.826, synth_frac_b = 0.165, synth_frac_out = 0.008;
  double synth_offset = 1.0, synth_noise = 0.05;
  std::uint64_t synth_seed = 0;
  std::string synth_out;

  CLI::App* train = app.add_subcommand("train", "fit a model and write it to disk");
  add_io_options(train, train_io);
  train_args.add_options(train, true);
  train->add_option("--out", train_out, "model file path")->required();

  CLI::App* predict = app.add_subcommand("predict", "write predictions for a dataset");
  add_io_options(predict, predict_io);
  predict->add_option("--model", predict_model, "model file path")->required();
  predict->add_option("--out", predict_out, "predictions file; omit for standard output");

  CLI::App* eval = app.add_subcommand("eval", "score a predictions file against targets");
  add_io_options(eval, eval_io);
  eval->add_option("--pred", eval_pred, "predictions file, one value per line")->required();

  CLI::App* cv = app.add_subcommand("cv", "repeated k-fold cross-validated benchmark");
  add_io_options(cv, cv_io);
  cv_args.add_options(cv, false, false);
  cv->add_option("--methods", cv_methods, "comma list: cd-rbf cd-linear esvr esvr-linear asgd ols");
  cv->add_option("--folds", cv_folds, "fold count");
  cv->add_option("--repeats", cv_repeats, "shuffle repeats");
  cv->add_option("--seed", cv_seed, "fold shuffle seed, also seeds the gradient solver");
  cv->add_option("--grid-c", grid_c, "comma list of C candidates");
  cv->add_option("--grid-epsilon", grid_eps, "comma list of epsilon candidates");
  cv->add_option("--grid-gamma", grid_gamma, "comma list of rbf gamma candidates");
  cv->add_option("--out", cv_out, "machine-readable report path");

  CLI::App* synth = app.add_subcommand("synth", "generate the two-lines benchmark dataset");
  synth->add_option("--n", synth_n, "row count");
  synth->add_option("--frac-a", synth_frac_a, "fraction on line A");
  synth->add_option("--frac-b", synth_frac_b, "fraction on line B");
  synth->add_option("--frac-out", synth_frac_out, "fraction of outliers");
  synth->add_option("--offset", synth_offset, "line B vertical offset");
  synth->add_option("--noise", synth_noise, "gaussian noise sd on both lines");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_io, train_args, train_out);
    if (predict->parsed()) return cmd_predict(predict_io, predict_model, predict_out);
    if (eval->parsed()) return cmd_eval(eval_io, eval_pred);
    if (cv->parsed())
      return cmd_cv(cv_io, cv_args, cv_methods, cv_folds, cv_repeats, cv_seed, grid_c, grid_eps,
                    grid_gamma, cv_out);
    if (synth->parsed())
      return cmd_synth(synth_n, synth_frac_a, synth_frac_b, synth_frac_out, synth_offset,
                       synth_noise, synth_seed, synth_out);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
