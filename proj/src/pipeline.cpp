#include "edwsvr/pipeline.hpp"

#include <stdexcept>

namespace edwsvr {

Model train_model(const Dataset& data, const TrainSpec& spec) {
  data.validate();

  NormalizationMap norm =
      spec.normalize ? fit_minmax(data) : NormalizationMap::identity(data.dim());
  Dataset work = norm.apply(data);

  std::optional<PcaTransform> pca;
  if (spec.pca_variance) {
    pca = fit_pca(work, *spec.pca_variance);
    work = pca->apply(work);
  }
  Preprocessing prep{norm, pca};

  KernelSpec kernel = spec.kernel;
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.gamma <= 0)
    kernel.gamma = 1.0 / static_cast<double>(work.dim());

  switch (spec.solver) {
    case SolverKind::cd: {
      cd::DualModel model = cd::train_cd(work, kernel, spec.cd);
      model.prep = prep;
      return model;
    }
    case SolverKind::esvr: {
      cd::DualModel model = baselines::train_esvr(work, kernel, spec.esvr);
      model.prep = prep;
      return model;
    }
    case SolverKind::asgd: {
      if (kernel.kind != KernelSpec::Kind::linear)
        throw std::invalid_argument("train_model: the averaged-gradient solver supports the linear kernel only");
      asgd::LinearModel model = asgd::train_asgd(work, spec.asgd);
      model.prep = prep;
      return model;
    }
    case SolverKind::ols: {
      baselines::OlsModel model = baselines::train_ols(work);
      model.prep = prep;
      return model;
    }
  }
  throw std::invalid_argument("train_model: unknown solver kind");
}

double predict_one(const Model& model, const Eigen::VectorXd& query) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, cd::DualModel>)
          return cd::predict_dual(m, query);
        else if constexpr (std::is_same_v<T, asgd::LinearModel>)
          return asgd::predict_linear(m, query);
        else
          return baselines::predict_ols(m, query);
      },
      model);
}

Eigen::VectorXd predict_many(const Model& model, const Eigen::MatrixXd& queries) {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out(i) = predict_one(model, queries.row(i).transpose());
  return out;
}

const Preprocessing& model_preprocessing(const Model& model) {
  return std::visit([](const auto& m) -> const Preprocessing& { return m.prep; }, model);
}

Eigen::Index model_input_dim(const Model& model) {
  return model_preprocessing(model).norm.feature_min.size();
}

}  // namespace edwsvr
