#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pss/ensemble.hpp"

namespace pss {

/// Repeated random subsampling: one stratified train/test split per seed.
struct SplitSpec {
  double test_fraction = 0.2;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t stratify_on = 0;  // label column; 0 = stres

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Test size is round(test_fraction * n) (half away from zero). Each stratum
// gets floor or ceil of its proportional share by largest remainder, then its
// members are shuffled with Rng(seed) and the first ones go to test.
SplitIndices stratified_split(std::span<const std::uint8_t> strata, std::uint64_t seed, double test_fraction);
SplitIndices split(const LabelMatrix& labels, std::uint64_t seed, const SplitSpec& spec);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Class 1 is the positive class.
ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

struct MetricTriple {
  double precision = 0, recall = 0, f1 = 0;
};

// Per-class precision, recall and F1 (class 0 scored with 0 as positive),
// then the unweighted mean over both classes. A 0/0 term counts as 0 and
// sets `zero_division` when provided.
MetricTriple macro_metrics(const ConfusionMatrix& cm, bool* zero_division = nullptr);

MetricTriple multilabel_macro(std::span<const MetricTriple> per_label);

struct MeanStd {
  double mean = 0, std = 0;  // sample std over seeds; 0 for one seed
};

MeanStd mean_std(std::span<const double> values);

/// One (model, seed) cell of the experiment grid.
struct CellResult {
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t train_size = 0, test_size = 0;
  std::array<ConfusionMatrix, kLabelCount> confusion{};
  std::array<MetricTriple, kLabelCount> per_label{};
  MetricTriple averaged;
  std::array<std::vector<double>, kLabelCount> label_importance;
  std::vector<double> importance;  // mean over labels, renormalized
  std::size_t zero_division_events = 0;
};

struct ModelAggregate {
  std::string model_id;
  MeanStd precision, recall, f1;
};

struct ExperimentReport {
  std::vector<ModelSpec> models;
  SplitSpec split;
  std::size_t dataset_rows = 0;
  std::size_t feature_count = 0;
  std::vector<CellResult> cells;  // model-major, seed-minor
  std::vector<ModelAggregate> aggregates;

  const CellResult& cell(std::size_t model, std::size_t seed) const {
    return cells[model * split.seeds.size() + seed];
  }
};

// Per-model mean +- sample std of the label-averaged metrics over seeds.
std::vector<ModelAggregate> aggregate(const std::vector<ModelSpec>& models, const SplitSpec& spec,
                                      std::span<const CellResult> cells);

/// Fits every (model, seed) cell and assembles the report in grid order,
/// independent of the order cells finish in. With Exec::parallel the grid
/// cells run concurrently.
ExperimentReport run_experiment(const FeatureMatrix& x, const LabelMatrix& y, const std::vector<ModelSpec>& models,
                                const SplitSpec& spec, Exec exec = Exec::parallel);

}  // namespace pss
