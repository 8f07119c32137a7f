#include <algorithm>
#include <cmath>
#include <numeric>

#include "pss/ensemble.hpp"
#include "pss/errors.hpp"

namespace pss {

namespace {

double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

// log(1 + e^f) without overflow.
double softplus(double f) { return f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f)); }

}  // namespace

double binomial_deviance(std::span<const std::uint8_t> y, std::span<const double> raw) {
  if (y.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += softplus(raw[i]) - (y[i] ? raw[i] : 0.0);
  return 2.0 * sum / static_cast<double>(y.size());
}

EnsembleModel fit_gboost(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                         BoostTrace* trace) {
  params.validate();
  const std::size_t n = x.rows();
  if (n == 0) throw ValidationError("cannot fit gradient boosting on an empty training set");
  if (y.size() != n) throw ValidationError("label count does not match feature rows");

  EnsembleModel model;
  model.kind = ModelKind::gboost;
  model.params = params;
  model.learning_rate = params.learning_rate;

  const auto ones = static_cast<double>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  const double base = ones / static_cast<double>(n);
  if (base <= 0.0) {
    model.init_raw = -kMaxRawScore;
  } else if (base >= 1.0) {
    model.init_raw = kMaxRawScore;
  } else {
    model.init_raw = std::clamp(std::log(base / (1.0 - base)), -kMaxRawScore, kMaxRawScore);
  }

  std::vector<double> raw(n, model.init_raw);
  if (trace) trace->deviance.push_back(binomial_deviance(y, raw));
  if (base <= 0.0 || base >= 1.0) {
    model.importance.assign(x.cols(), 0.0);
    return model;
  }

  std::vector<double> residual(n), hessian(n);
  std::vector<std::size_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0);
  TreeTask task;
  task.criterion = params.second_order_gain ? SplitCriterion::second_order : SplitCriterion::variance;
  task.leaf = LeafRule::newton;
  task.l2 = params.second_order_gain ? params.l2_regularization : 0.0;
  task.max_abs_leaf = kMaxRawScore;
  task.residuals = residual;
  task.hessians = hessian;
  Rng rng(params.seed);

  for (int stage = 0; stage < params.n_members; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      residual[i] = (y[i] ? 1.0 : 0.0) - p;
      hessian[i] = p * (1.0 - p);
    }
    Tree tree = grow_tree(x, task, samples, params, rng);
    for (std::size_t i = 0; i < n; ++i) raw[i] += params.learning_rate * tree.predict_value(x.row(i));
    model.members.push_back(std::move(tree));
    model.member_weights.push_back(1.0);
    if (trace) trace->deviance.push_back(binomial_deviance(y, raw));
  }

  model.importance = feature_importance(model, x.cols());
  return model;
}

}  // namespace pss
