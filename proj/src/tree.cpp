#include "pss/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pss/errors.hpp"

namespace pss {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, int max_value, std::vector<std::uint8_t> values)
    : rows_(rows), cols_(cols), max_value_(max_value), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw ValidationError("feature matrix is not rectangular");
  if (max_value_ < 0 || max_value_ > 255) throw ValidationError("feature levels must fit in [0,255]");
  for (auto v : values_) {
    if (v > max_value_) throw ValidationError("feature value " + std::to_string(v) + " exceeds " + std::to_string(max_value_));
  }
}

FeatureMatrix FeatureMatrix::from_sheets(std::span<const ResponseSheet> sheets, const ScaleDefinition& scale) {
  const auto cols = static_cast<std::size_t>(scale.item_count);
  std::vector<std::uint8_t> values;
  values.reserve(sheets.size() * cols);
  for (const auto& s : sheets) {
    validate_sheet(scale, s);
    for (int a : s.answers) values.push_back(static_cast<std::uint8_t>(a));
  }
  return FeatureMatrix(sheets.size(), cols, scale.max_item_value, std::move(values));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> values;
  values.reserve(rows.size() * cols_);
  for (auto r : rows) {
    auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return FeatureMatrix(rows.size(), cols_, max_value_, std::move(values));
}

LabelMatrix LabelMatrix::from_records(std::span<const ScoredRecord> records) {
  LabelMatrix m(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t l = 0; l < kLabelCount; ++l) m.set(r, l, records[r].labels[l]);
  }
  return m;
}

LabelMatrix LabelMatrix::from_triples(std::span<const LabelTriple> triples) {
  LabelMatrix m(triples.size());
  for (std::size_t r = 0; r < triples.size(); ++r) {
    for (std::size_t l = 0; l < kLabelCount; ++l) m.set(r, l, triples[r][l]);
  }
  return m;
}

std::vector<std::uint8_t> LabelMatrix::column(std::size_t label) const {
  std::vector<std::uint8_t> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, label);
  return out;
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::size_t> rows) const {
  LabelMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t l = 0; l < kLabelCount; ++l) m.set(i, l, at(rows[i], l));
  }
  return m;
}

void HyperParams::validate() const {
  if (max_depth && *max_depth < 1) throw ValidationError("max_depth must be at least 1");
  if (min_samples_split < 2) throw ValidationError("min_samples_split must be at least 2");
  if (n_members < 0) throw ValidationError("n_members must be non-negative");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ValidationError("learning_rate must lie in (0,1]");
  if (!(l2_regularization >= 0.0)) throw ValidationError("l2_regularization must be non-negative");
}

const TreeNode& Tree::leaf_for(std::span<const std::uint8_t> x) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = &nodes[static_cast<double>(x[node->feature]) <= node->threshold ? node->left : node->right];
  }
  return *node;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return best;
}

std::size_t Tree::split_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

double gini(std::span<const double> class_counts) {
  double total = 0;
  for (double c : class_counts) {
    if (c < 0) throw ValidationError("gini: negative class count");
    total += c;
  }
  if (total <= 0) throw ValidationError("gini: all class counts are zero");
  double sq = 0;
  for (double c : class_counts) sq += (c / total) * (c / total);
  return 1.0 - sq;
}

namespace {

// Sufficient statistics for one side of a split. For gini `a`/`b` are the
// class-0/class-1 weights; for regression `a` is sum(w*r) and `b` sum(w*h).
struct Stats {
  std::size_t n = 0;
  double w = 0, a = 0, b = 0;

  void add(const Stats& o) {
    n += o.n;
    w += o.w;
    a += o.a;
    b += o.b;
  }
  Stats minus(const Stats& o) const { return {n - o.n, w - o.w, a - o.a, b - o.b}; }
};

double weight_of(const TreeTask& task, std::size_t i) { return task.weights.empty() ? 1.0 : task.weights[i]; }

Stats sample_stats(const TreeTask& task, std::size_t i) {
  const double w = weight_of(task, i);
  Stats s{1, w, 0, 0};
  switch (task.criterion) {
    case SplitCriterion::gini:
      (task.labels[i] ? s.b : s.a) = w;
      break;
    case SplitCriterion::variance:
      s.a = w * task.residuals[i];
      if (!task.hessians.empty()) s.b = w * task.hessians[i];
      break;
    case SplitCriterion::second_order:
      s.a = w * task.residuals[i];
      s.b = w * task.hessians[i];
      break;
  }
  return s;
}

// Per-side score whose (left + right - parent) difference is the gain, up to
// the normalization applied in split_gain.
double side_score(const TreeTask& task, const Stats& s) {
  switch (task.criterion) {
    case SplitCriterion::gini:
      return (s.a * s.a + s.b * s.b) / s.w;
    case SplitCriterion::variance:
      return s.a * s.a / s.w;
    case SplitCriterion::second_order:
      return s.a * s.a / (s.b + task.l2);
  }
  return 0;
}

double split_gain(const TreeTask& task, const Stats& parent, const Stats& left, const Stats& right) {
  const double diff = side_score(task, left) + side_score(task, right) - side_score(task, parent);
  return task.criterion == SplitCriterion::second_order ? 0.5 * diff : diff / parent.w;
}

void fill_leaf(const TreeTask& task, const Stats& s, TreeNode& node) {
  switch (task.leaf) {
    case LeafRule::class_distribution:
      node.class_weights = {s.a, s.b};
      node.prediction = s.b > s.a ? 1 : 0;
      node.value = s.w > 0 ? s.b / s.w : 0.0;
      break;
    case LeafRule::mean:
      node.value = s.w > 0 ? s.a / s.w : 0.0;
      node.prediction = node.value > 0.5 ? 1 : 0;
      break;
    case LeafRule::newton: {
      const double denom = s.b + task.l2;
      double v = 0.0;
      if (denom > 1e-300) {
        v = s.a / denom;
      } else if (s.a != 0.0) {
        v = s.a > 0 ? task.max_abs_leaf : -task.max_abs_leaf;
      }
      node.value = std::clamp(v, -task.max_abs_leaf, task.max_abs_leaf);
      node.prediction = node.value > 0 ? 1 : 0;
      break;
    }
  }
}

Stats node_stats(const TreeTask& task, std::span<const std::size_t> samples) {
  Stats s;
  for (auto i : samples) s.add(sample_stats(task, i));
  return s;
}

class Grower {
 public:
  Grower(const FeatureMatrix& x, const TreeTask& task, const HyperParams& params, Rng& rng)
      : x_(x), task_(task), params_(params), rng_(rng) {
    all_features_.resize(x.cols());
    std::iota(all_features_.begin(), all_features_.end(), 0);
    subsample_k_ = params.feature_subsample == FeatureSubsample::sqrt
                       ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))))
                       : x.cols();
  }

  Tree grow(std::vector<std::size_t> samples) {
    root_weight_ = node_stats(task_, samples).w;
    build(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  std::vector<int> candidates() {
    if (subsample_k_ >= all_features_.size()) return all_features_;
    std::vector<int> pool = all_features_;
    for (std::size_t i = 0; i < subsample_k_; ++i) {
      const auto j = i + rng_.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(subsample_k_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  int build(std::vector<std::size_t> samples, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const Stats s = node_stats(task_, samples);
    tree_.nodes[id].weight_fraction = root_weight_ > 0 ? s.w / root_weight_ : 0.0;

    const bool pure = task_.criterion == SplitCriterion::gini && (s.a <= 0 || s.b <= 0);
    const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
    std::optional<Split> split;
    if (!pure && depth_ok && samples.size() >= static_cast<std::size_t>(params_.min_samples_split)) {
      const auto features = candidates();
      split = best_split(x_, task_, samples, features);
    }
    if (!split) {
      fill_leaf(task_, s, tree_.nodes[id]);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto i : samples) {
      (static_cast<double>(x_.at(i, split->feature)) <= split->threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    tree_.nodes[id].feature = split->feature;
    tree_.nodes[id].threshold = split->threshold;
    tree_.nodes[id].gain = split->gain;
    // Keep the distribution on internal nodes too; handy for inspection.
    if (task_.leaf == LeafRule::class_distribution) tree_.nodes[id].class_weights = {s.a, s.b};
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  const FeatureMatrix& x_;
  const TreeTask& task_;
  const HyperParams& params_;
  Rng& rng_;
  std::vector<int> all_features_;
  std::size_t subsample_k_ = 0;
  double root_weight_ = 0;
  Tree tree_;
};

}  // namespace

std::optional<Split> best_split(const FeatureMatrix& x, const TreeTask& task, std::span<const std::size_t> samples,
                                std::span<const int> candidate_features) {
  if (samples.size() < 2) return std::nullopt;
  const auto levels = static_cast<std::size_t>(x.max_value()) + 1;
  std::vector<Stats> bins(levels);

  Stats parent;
  for (auto i : samples) parent.add(sample_stats(task, i));
  if (parent.w <= 0) return std::nullopt;

  std::optional<Split> best;
  for (int f : candidate_features) {
    std::fill(bins.begin(), bins.end(), Stats{});
    for (auto i : samples) bins[x.at(i, f)].add(sample_stats(task, i));

    Stats left;
    int prev = -1;
    for (std::size_t v = 0; v < levels; ++v) {
      if (bins[v].n == 0) continue;
      if (prev >= 0) {
        const Stats right = parent.minus(left);
        if (left.w > 0 && right.w > 0) {
          const double gain = split_gain(task, parent, left, right);
          if (gain > kMinGain && (!best || gain > best->gain + kMinGain)) {
            best = Split{f, (prev + static_cast<double>(v)) / 2.0, gain};
          }
        }
      }
      left.add(bins[v]);
      prev = static_cast<int>(v);
    }
  }
  return best;
}

Tree grow_tree(const FeatureMatrix& x, const TreeTask& task, std::span<const std::size_t> samples,
               const HyperParams& params, Rng& rng) {
  if (samples.empty()) throw ValidationError("cannot fit a tree on an empty training set");
  params.validate();
  Grower grower(x, task, params, rng);
  return grower.grow(std::vector<std::size_t>(samples.begin(), samples.end()));
}

Tree fit_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y, std::span<const double> weights,
              const HyperParams& params) {
  if (y.size() != x.rows()) throw ValidationError("label count does not match feature rows");
  if (!weights.empty() && weights.size() != x.rows()) throw ValidationError("weight count does not match feature rows");
  TreeTask task;
  task.labels = y;
  task.weights = weights;
  std::vector<std::size_t> samples(x.rows());
  std::iota(samples.begin(), samples.end(), 0);
  Rng rng(params.seed);
  return grow_tree(x, task, samples, params, rng);
}

Tree fit_regression_tree(const FeatureMatrix& x, std::span<const double> y, std::span<const double> weights,
                         const HyperParams& params) {
  if (y.size() != x.rows()) throw ValidationError("target count does not match feature rows");
  TreeTask task;
  task.criterion = SplitCriterion::variance;
  task.leaf = LeafRule::mean;
  task.residuals = y;
  task.weights = weights;
  std::vector<std::size_t> samples(x.rows());
  std::iota(samples.begin(), samples.end(), 0);
  Rng rng(params.seed);
  return grow_tree(x, task, samples, params, rng);
}

std::vector<double> split_importance(const Tree& tree, std::size_t feature_count) {
  std::vector<double> imp(feature_count, 0.0);
  for (const auto& n : tree.nodes) {
    if (!n.is_leaf()) imp[static_cast<std::size_t>(n.feature)] += n.gain * n.weight_fraction;
  }
  return imp;
}

}  // namespace pss
