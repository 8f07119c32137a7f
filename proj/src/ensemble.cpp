#include "pss/ensemble.hpp"

#include <charconv>
#include <cmath>

#include "pss/errors.hpp"

namespace pss {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::adaboost: return "adaboost";
    case ModelKind::gboost: return "gboost";
  }
  return "tree";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "tree") return ModelKind::tree;
  if (name == "forest") return ModelKind::forest;
  if (name == "adaboost") return ModelKind::adaboost;
  if (name == "gboost") return ModelKind::gboost;
  throw ValidationError("unknown model kind \"" + std::string(name) + "\"");
}

double EnsembleModel::decision(std::span<const std::uint8_t> x) const {
  switch (kind) {
    case ModelKind::tree:
      return members.front().predict_value(x) - 0.5;
    case ModelKind::forest: {
      std::size_t ones = 0;
      for (const auto& t : members) ones += static_cast<std::size_t>(t.predict_class(x));
      return static_cast<double>(ones) / static_cast<double>(members.size()) - 0.5;
    }
    case ModelKind::adaboost: {
      double margin = 0;
      for (std::size_t m = 0; m < members.size(); ++m) {
        margin += member_weights[m] * (2.0 * members[m].predict_class(x) - 1.0);
      }
      return margin;
    }
    case ModelKind::gboost: {
      double f = init_raw;
      for (const auto& t : members) f += learning_rate * t.predict_value(x);
      return f;
    }
  }
  return 0.0;
}

int EnsembleModel::predict(std::span<const std::uint8_t> x) const { return decision(x) > 0.0 ? 1 : 0; }

std::vector<std::uint8_t> EnsembleModel::predict(const FeatureMatrix& x, Exec exec) const {
  std::vector<std::uint8_t> out(x.rows());
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = static_cast<std::uint8_t>(predict(x.row(r)));
  return out;
}

std::vector<double> feature_importance(const EnsembleModel& model, std::size_t feature_count) {
  std::vector<double> total(feature_count, 0.0);
  for (std::size_t m = 0; m < model.members.size(); ++m) {
    const double weight = model.kind == ModelKind::adaboost ? model.member_weights[m] : 1.0;
    if (weight <= 0.0) continue;
    const auto imp = split_importance(model.members[m], feature_count);
    for (std::size_t f = 0; f < feature_count; ++f) total[f] += weight * imp[f];
  }
  double sum = 0;
  for (double v : total) sum += v;
  if (sum > 0) {
    for (auto& v : total) v /= sum;
  } else {
    std::fill(total.begin(), total.end(), 0.0);
  }
  return total;
}

const std::vector<std::string>& known_model_ids() {
  static const std::vector<std::string> ids{"dt", "rf", "ada", "gb", "gb2"};
  return ids;
}

ModelSpec default_spec(std::string_view id) {
  ModelSpec spec;
  spec.id = std::string(id);
  HyperParams& p = spec.params;
  if (id == "dt") {
    spec.kind = ModelKind::tree;
  } else if (id == "rf") {
    spec.kind = ModelKind::forest;
    p.n_members = 100;
    p.feature_subsample = FeatureSubsample::sqrt;
    p.bootstrap = true;
  } else if (id == "ada") {
    spec.kind = ModelKind::adaboost;
    p.max_depth = 1;
    p.n_members = 50;
  } else if (id == "gb" || id == "gb2") {
    spec.kind = ModelKind::gboost;
    p.max_depth = 3;
    p.n_members = 100;
    p.learning_rate = 0.1;
    p.second_order_gain = id == "gb2";
  } else {
    throw ValidationError("unknown model id \"" + std::string(id) + "\" (known: dt, rf, ada, gb, gb2)");
  }
  return spec;
}

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ValidationError("invalid value \"" + std::string(value) + "\" for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("invalid boolean \"" + std::string(value) + "\" for " + std::string(key));
}

}  // namespace

void apply_override(ModelSpec& spec, std::string_view key, std::string_view value) {
  HyperParams& p = spec.params;
  if (key == "max_depth") {
    if (value == "none" || value == "unlimited") {
      p.max_depth.reset();
    } else {
      p.max_depth = parse_number<int>(key, value);
    }
  } else if (key == "min_samples_split") {
    p.min_samples_split = parse_number<int>(key, value);
  } else if (key == "n_members") {
    p.n_members = parse_number<int>(key, value);
  } else if (key == "feature_subsample") {
    if (value == "all") {
      p.feature_subsample = FeatureSubsample::all;
    } else if (value == "sqrt") {
      p.feature_subsample = FeatureSubsample::sqrt;
    } else {
      throw ValidationError("feature_subsample must be all or sqrt");
    }
  } else if (key == "learning_rate") {
    p.learning_rate = parse_number<double>(key, value);
  } else if (key == "bootstrap") {
    p.bootstrap = parse_bool(key, value);
  } else if (key == "second_order_gain") {
    p.second_order_gain = parse_bool(key, value);
  } else if (key == "l2_regularization") {
    p.l2_regularization = parse_number<double>(key, value);
  } else if (key == "seed") {
    p.seed = parse_number<std::uint64_t>(key, value);
  } else {
    throw ValidationError("unknown hyperparameter \"" + std::string(key) + "\"");
  }
  p.validate();
}

EnsembleModel fit_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const std::uint8_t> y, Exec exec) {
  switch (spec.kind) {
    case ModelKind::tree: return fit_decision_tree(x, y, spec.params);
    case ModelKind::forest: return fit_forest(x, y, spec.params, exec);
    case ModelKind::adaboost: return fit_adaboost(x, y, spec.params);
    case ModelKind::gboost: return fit_gboost(x, y, spec.params);
  }
  throw ValidationError("unsupported model kind");
}

LabelMatrix MultiOutputModel::predict(const FeatureMatrix& x, Exec exec) const {
  LabelMatrix out(x.rows());
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      out.set(r, l, static_cast<std::uint8_t>(per_label[l].predict(x.row(r))));
    }
  }
  return out;
}

MultiOutputModel fit_multioutput(const ModelSpec& spec, const FeatureMatrix& x, const LabelMatrix& y, Exec exec,
                                 SeedPolicy seeds) {
  if (x.rows() != y.rows()) throw ValidationError("feature and label row counts differ");
  MultiOutputModel model;
  const bool parallel = exec == Exec::parallel;
  std::array<std::string, kLabelCount> errors;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    ModelSpec label_spec = spec;
    if (seeds == SeedPolicy::per_label) label_spec.params.seed = derive_seed(spec.params.seed, l);
    const auto column = y.column(l);
    try {
      model.per_label[l] = fit_model(label_spec, x, column, exec);
    } catch (const std::exception& e) {
      errors[l] = std::string(kLabelNames[l]) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ValidationError(e);
  }
  return model;
}

}  // namespace pss
