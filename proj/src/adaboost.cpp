#include <algorithm>
#include <cmath>
#include <numeric>

#include "pss/ensemble.hpp"
#include "pss/errors.hpp"

namespace pss {

double adaboost_alpha(double weighted_error, double learning_rate) {
  if (weighted_error >= 0.5) return 0.0;
  if (weighted_error <= 0.0) return kMaxAdaBoostAlpha;
  return std::min(learning_rate * std::log((1.0 - weighted_error) / weighted_error), kMaxAdaBoostAlpha);
}

EnsembleModel fit_adaboost(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                           AdaBoostTrace* trace) {
  params.validate();
  const std::size_t n = x.rows();
  if (n == 0) throw ValidationError("cannot fit AdaBoost on an empty training set");
  if (y.size() != n) throw ValidationError("label count does not match feature rows");

  EnsembleModel model;
  model.kind = ModelKind::adaboost;
  model.params = params;
  model.learning_rate = params.learning_rate;

  const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  if (ones == 0 || ones == n) {
    // Single class: one leaf, no boosting rounds.
    model.members.push_back(fit_tree(x, y, {}, params));
    model.member_weights.push_back(1.0);
    model.importance.assign(x.cols(), 0.0);
    return model;
  }

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0);
  TreeTask task;
  task.labels = y;
  Rng rng(params.seed);

  for (int round = 0; round < params.n_members; ++round) {
    task.weights = w;
    Tree stump = grow_tree(x, task, samples, params, rng);

    std::vector<bool> miss(n);
    double err = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = stump.predict_class(x.row(i)) != y[i];
      total += w[i];
      if (miss[i]) err += w[i];
    }
    err /= total;
    if (trace) trace->errors.push_back(err);

    if (err >= 0.5) {
      if (trace) trace->alphas.push_back(0.0);
      break;
    }
    const double alpha = adaboost_alpha(err, params.learning_rate);
    if (trace) trace->alphas.push_back(alpha);
    model.members.push_back(std::move(stump));
    model.member_weights.push_back(alpha);
    if (err <= 0.0) break;

    const double boost = std::exp(alpha);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= boost;
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;
    if (trace) {
      trace->weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
      trace->min_weights.push_back(*std::min_element(w.begin(), w.end()));
    }
  }

  model.importance = feature_importance(model, x.cols());
  return model;
}

}  // namespace pss
