#pragma once

#include <optional>
#include <variant>

#include "edwsvr/asgd_solver.hpp"
#include "edwsvr/baselines.hpp"
#include "edwsvr/cd_solver.hpp"

namespace edwsvr {

enum class SolverKind { cd, esvr, asgd, ols };

// One training recipe: preprocessing choices plus the per-solver settings.
// Only the block matching `solver` is consulted.
struct TrainSpec {
  SolverKind solver = SolverKind::cd;
  KernelSpec kernel;  // gamma <= 0 on an rbf kernel means 1/dim after preprocessing
  bool normalize = true;
  std::optional<double> pca_variance;  // retained-variance threshold in (0, 1]
  cd::CdConfig cd;
  baselines::EsvrConfig esvr;
  asgd::AsgdConfig asgd;
};

using Model = std::variant<cd::DualModel, asgd::LinearModel, baselines::OlsModel>;

// Fits preprocessing on `data`, trains in preprocessed units, and returns a
// model whose predictions are in raw target units.
Model train_model(const Dataset& data, const TrainSpec& spec);

double predict_one(const Model& model, const Eigen::VectorXd& query);
Eigen::VectorXd predict_many(const Model& model, const Eigen::MatrixXd& queries);

const Preprocessing& model_preprocessing(const Model& model);

// Raw feature dimension the model expects at prediction time.
Eigen::Index model_input_dim(const Model& model);

}  // namespace edwsvr
