#include <numeric>

#include "pss/ensemble.hpp"
#include "pss/errors.hpp"

namespace pss {

EnsembleModel fit_decision_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params) {
  EnsembleModel model;
  model.kind = ModelKind::tree;
  model.params = params;
  model.members.push_back(fit_tree(x, y, {}, params));
  model.member_weights.push_back(1.0);
  model.importance = feature_importance(model, x.cols());
  return model;
}

EnsembleModel fit_forest(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                         Exec exec) {
  params.validate();
  if (x.rows() == 0) throw ValidationError("cannot fit a forest on an empty training set");
  if (y.size() != x.rows()) throw ValidationError("label count does not match feature rows");
  if (params.n_members < 1) throw ValidationError("a forest needs at least one member");

  const auto members = static_cast<std::size_t>(params.n_members);
  const std::size_t n = x.rows();
  TreeTask task;
  task.labels = y;

  EnsembleModel model;
  model.kind = ModelKind::forest;
  model.params = params;
  model.members.resize(members);
  model.member_weights.assign(members, 1.0);

  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t m = 0; m < members; ++m) {
    Rng rng(derive_seed(params.seed, m));
    std::vector<std::size_t> samples(n);
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    model.members[m] = grow_tree(x, task, samples, params, rng);
  }

  model.importance = feature_importance(model, x.cols());
  return model;
}

}  // namespace pss
