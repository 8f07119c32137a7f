#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pss/rng.hpp"
#include "pss/scale.hpp"

namespace pss {

/// Dense row-major matrix of ordinal answers (0..max_value per cell).
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, int max_value, std::vector<std::uint8_t> values);

  static FeatureMatrix from_sheets(std::span<const ResponseSheet> sheets, const ScaleDefinition& scale);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int max_value() const { return max_value_; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const std::uint8_t> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int max_value_ = 0;
  std::vector<std::uint8_t> values_;
};

/// rows x 3 binary targets in (stres, faktor_1, faktor_2) order.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  explicit LabelMatrix(std::size_t rows) : rows_(rows), values_(rows * kLabelCount, 0) {}

  static LabelMatrix from_records(std::span<const ScoredRecord> records);
  static LabelMatrix from_triples(std::span<const LabelTriple> triples);

  std::size_t rows() const { return rows_; }
  std::uint8_t at(std::size_t r, std::size_t label) const { return values_[r * kLabelCount + label]; }
  void set(std::size_t r, std::size_t label, std::uint8_t v) { values_[r * kLabelCount + label] = v; }
  std::vector<std::uint8_t> column(std::size_t label) const;
  LabelMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const LabelMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> values_;
};

enum class FeatureSubsample { all, sqrt };

struct HyperParams {
  std::optional<int> max_depth;  // nullopt: grow until pure
  int min_samples_split = 2;
  int n_members = 1;
  FeatureSubsample feature_subsample = FeatureSubsample::all;
  double learning_rate = 1.0;
  bool bootstrap = false;
  bool second_order_gain = false;
  double l2_regularization = 1.0;  // only read when second_order_gain is set
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

/// Flat-array tree node. Internal nodes send `x[feature] <= threshold` left.
/// Leaves carry the weighted class distribution (classification) or a raw
/// score (boosting regression trees).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double gain = 0.0;             // impurity decrease at this split
  double weight_fraction = 0.0;  // node weight / root weight
  std::array<double, 2> class_weights{};
  int prediction = 0;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const std::uint8_t> x) const;
  int predict_class(std::span<const std::uint8_t> x) const { return leaf_for(x).prediction; }
  double predict_value(std::span<const std::uint8_t> x) const { return leaf_for(x).value; }
  int depth() const;
  std::size_t split_count() const;

  bool operator==(const Tree&) const = default;
};

// 1 - sum p_i^2. Throws ValidationError when every count is zero.
double gini(std::span<const double> class_counts);

enum class SplitCriterion { gini, variance, second_order };
enum class LeafRule { class_distribution, mean, newton };

/// What a tree is fit to. Gini reads `labels`; variance and second-order
/// splits read `residuals` (and `hessians` for second-order). An empty
/// `weights` span means unit weights.
struct TreeTask {
  SplitCriterion criterion = SplitCriterion::gini;
  LeafRule leaf = LeafRule::class_distribution;
  std::span<const std::uint8_t> labels;
  std::span<const double> residuals;
  std::span<const double> hessians;
  std::span<const double> weights;
  double l2 = 0.0;
  double max_abs_leaf = 10.0;
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Gains at or below this are treated as "no improvement".
inline constexpr double kMinGain = 1e-12;

/// Exhaustive search over midpoints between consecutive observed levels of
/// each candidate feature. Ties keep the earlier (feature, threshold) pair,
/// so candidates should be passed in ascending order.
std::optional<Split> best_split(const FeatureMatrix& x, const TreeTask& task, std::span<const std::size_t> samples,
                                std::span<const int> candidate_features);

/// Greedy CART growth over `samples` (duplicates allowed, e.g. bootstrap).
/// `rng` is consulted only for per-node feature subsampling.
Tree grow_tree(const FeatureMatrix& x, const TreeTask& task, std::span<const std::size_t> samples,
               const HyperParams& params, Rng& rng);

// Classification tree on every row of x.
Tree fit_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y, std::span<const double> weights,
              const HyperParams& params);

// Regression tree (variance splits, mean leaves) on every row of x.
Tree fit_regression_tree(const FeatureMatrix& x, std::span<const double> y, std::span<const double> weights,
                         const HyperParams& params);

// Per-feature sum of gain * weight_fraction over the tree's splits (unnormalized).
std::vector<double> split_importance(const Tree& tree, std::size_t feature_count);

}  // namespace pss
