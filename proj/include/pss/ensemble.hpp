#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "pss/tree.hpp"

namespace pss {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path; `parallel` must produce bit-identical results.
enum class Exec { serial, parallel };

enum class ModelKind { tree, forest, adaboost, gboost };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct EnsembleModel {
  ModelKind kind = ModelKind::tree;
  std::vector<Tree> members;
  std::vector<double> member_weights;  // AdaBoost alphas, 1 elsewhere
  double learning_rate = 1.0;
  double init_raw = 0.0;  // boosting prior log-odds
  HyperParams params;
  std::vector<double> importance;  // normalized, or all zero

  // Margin whose sign decides the class: vote share minus one half for forests
  // and trees, the alpha-weighted vote for AdaBoost, log-odds for boosting.
  double decision(std::span<const std::uint8_t> x) const;
  int predict(std::span<const std::uint8_t> x) const;
  std::vector<std::uint8_t> predict(const FeatureMatrix& x, Exec exec = Exec::parallel) const;

  bool operator==(const EnsembleModel&) const = default;
};

EnsembleModel fit_decision_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params);

// Majority vote of bootstrapped, feature-subsampled trees; ties go to class 0.
// Member m draws from Rng(derive_seed(seed, m)), so the parallel path is
// identical to the serial one.
EnsembleModel fit_forest(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                         Exec exec = Exec::parallel);

// Per-round diagnostics from SAMME training.
struct AdaBoostTrace {
  std::vector<double> errors;
  std::vector<double> alphas;
  std::vector<double> weight_sums;  // after renormalization
  std::vector<double> min_weights;
};

inline constexpr double kMaxAdaBoostAlpha = 27.631021115928547;  // ln(1e12)

// Two-class SAMME: alpha = lr * ln((1 - eps) / eps). A perfect member
// (eps == 0) is kept with the capped alpha and ends training; eps >= 0.5
// discards the member and ends training.
EnsembleModel fit_adaboost(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                           AdaBoostTrace* trace = nullptr);

inline constexpr double kMaxRawScore = 10.0;

double adaboost_alpha(double weighted_error, double learning_rate = 1.0);

struct BoostTrace {
  std::vector<double> deviance;  // mean binomial deviance; [0] is the prior
};

/// Binomial-deviance gradient boosting. Each stage fits a regression tree to
/// y - sigmoid(F) and sets leaf values by one Newton step
/// sum(r) / (sum(p(1-p)) + l2), clamped to +-10. With second_order_gain the
/// splits maximize the regularized second-order gain and l2 applies; without
/// it splits use variance reduction and l2 is zero.
EnsembleModel fit_gboost(const FeatureMatrix& x, std::span<const std::uint8_t> y, const HyperParams& params,
                         BoostTrace* trace = nullptr);

double binomial_deviance(std::span<const std::uint8_t> y, std::span<const double> raw);

// Alpha-weighted (AdaBoost) or equally weighted sum of split gains scaled by
// node weight fraction, normalized to 1; all zero when nothing was split.
std::vector<double> feature_importance(const EnsembleModel& model, std::size_t feature_count);

/// Named model configuration: dt, rf, ada, gb, gb2.
struct ModelSpec {
  std::string id;
  ModelKind kind = ModelKind::tree;
  HyperParams params;

  bool operator==(const ModelSpec&) const = default;
};

ModelSpec default_spec(std::string_view id);
const std::vector<std::string>& known_model_ids();

// Applies "key=value" (max_depth, min_samples_split, n_members,
// feature_subsample, learning_rate, bootstrap, second_order_gain,
// l2_regularization, seed). max_depth accepts "none".
void apply_override(ModelSpec& spec, std::string_view key, std::string_view value);

EnsembleModel fit_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const std::uint8_t> y,
                        Exec exec = Exec::parallel);

/// One independent binary model per label column.
struct MultiOutputModel {
  std::array<EnsembleModel, kLabelCount> per_label;

  LabelMatrix predict(const FeatureMatrix& x, Exec exec = Exec::parallel) const;
  bool operator==(const MultiOutputModel&) const = default;
};

enum class SeedPolicy { per_label, shared };

MultiOutputModel fit_multioutput(const ModelSpec& spec, const FeatureMatrix& x, const LabelMatrix& y,
                                 Exec exec = Exec::parallel, SeedPolicy seeds = SeedPolicy::per_label);

}  // namespace pss
