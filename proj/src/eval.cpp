#include "pss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pss/errors.hpp"

namespace pss {

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test_fraction must lie in (0,1)");
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ValidationError("seeds must be distinct");
  }
  if (stratify_on >= kLabelCount) throw ValidationError("stratify_on must name a label column (0..2)");
}

SplitIndices stratified_split(std::span<const std::uint8_t> strata, std::uint64_t seed, double test_fraction) {
  const std::size_t n = strata.size();
  if (n < 10) throw ValidationError("split needs at least 10 rows, got " + std::to_string(n));
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test_fraction must lie in (0,1)");

  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < n; ++i) {
    if (strata[i] > 1) throw ValidationError("stratum values must be binary");
    members[strata[i]].push_back(i);
  }
  for (std::size_t s = 0; s < 2; ++s) {
    if (!members[s].empty() && members[s].size() < 2) {
      throw ValidationError("stratum " + std::to_string(s) + " has only " + std::to_string(members[s].size()) +
                            " sample");
    }
  }

  const auto test_total = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 2; ++s) {
    const double quota = test_fraction * static_cast<double>(members[s].size());
    take[s] = static_cast<std::size_t>(std::floor(quota));
    remainder[s] = quota - std::floor(quota);
    assigned += take[s];
  }
  // Largest remainder; ties go to stratum 0.
  std::array<std::size_t, 2> order{0, 1};
  if (remainder[1] > remainder[0]) order = {1, 0};
  for (std::size_t k = 0; assigned < test_total && k < 2; ++k) {
    const auto s = order[k];
    if (take[s] < members[s].size()) {
      ++take[s];
      ++assigned;
    }
  }

  Rng rng(seed);
  SplitIndices out;
  for (std::size_t s = 0; s < 2; ++s) {
    auto idx = members[s];
    shuffle(idx.begin(), idx.end(), rng);
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take[s]));
    out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(take[s]), idx.end());
  }
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

SplitIndices split(const LabelMatrix& labels, std::uint64_t seed, const SplitSpec& spec) {
  spec.validate();
  const auto strata = labels.column(spec.stratify_on);
  try {
    return stratified_split(strata, seed, spec.test_fraction);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(kLabelNames[spec.stratify_on]) + ": " + e.what());
  }
}

ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ValidationError("confusion: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                          std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw ValidationError("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] != 0, p = y_pred[i] != 0;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (t && !p) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& zero_div) {
  if (den == 0) {
    zero_div = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricTriple macro_metrics(const ConfusionMatrix& cm, bool* zero_division) {
  bool zd = false;
  // Class 1 positive: (tp, fp, fn). Class 0 positive: (tn, fn, fp).
  const double p1 = ratio(cm.tp, cm.tp + cm.fp, zd);
  const double r1 = ratio(cm.tp, cm.tp + cm.fn, zd);
  const double f1_1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn, zd);
  const double p0 = ratio(cm.tn, cm.tn + cm.fn, zd);
  const double r0 = ratio(cm.tn, cm.tn + cm.fp, zd);
  const double f1_0 = ratio(2 * cm.tn, 2 * cm.tn + cm.fn + cm.fp, zd);
  if (zero_division) *zero_division = zd;
  return {(p0 + p1) / 2.0, (r0 + r1) / 2.0, (f1_0 + f1_1) / 2.0};
}

MetricTriple multilabel_macro(std::span<const MetricTriple> per_label) {
  if (per_label.size() != kLabelCount) throw ValidationError("multilabel_macro expects exactly 3 labels");
  MetricTriple m;
  for (const auto& t : per_label) {
    m.precision += t.precision;
    m.recall += t.recall;
    m.f1 += t.f1;
  }
  const auto k = static_cast<double>(per_label.size());
  return {m.precision / k, m.recall / k, m.f1 / k};
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::vector<ModelAggregate> aggregate(const std::vector<ModelSpec>& models, const SplitSpec& spec,
                                      std::span<const CellResult> cells) {
  std::vector<ModelAggregate> out;
  const std::size_t seeds = spec.seeds.size();
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<double> p, r, f;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto& c = cells[m * seeds + s];
      p.push_back(c.averaged.precision);
      r.push_back(c.averaged.recall);
      f.push_back(c.averaged.f1);
    }
    out.push_back({models[m].id, mean_std(p), mean_std(r), mean_std(f)});
  }
  return out;
}

namespace {

CellResult run_cell(const FeatureMatrix& x, const LabelMatrix& y, const ModelSpec& model, std::uint64_t seed,
                    const SplitSpec& spec, Exec inner) {
  const auto parts = split(y, seed, spec);
  const auto x_train = x.select_rows(parts.train);
  const auto y_train = y.select_rows(parts.train);
  const auto x_test = x.select_rows(parts.test);
  const auto y_test = y.select_rows(parts.test);

  ModelSpec seeded = model;
  seeded.params.seed = derive_seed(model.params.seed, seed);
  const auto fitted = fit_multioutput(seeded, x_train, y_train, inner);
  const auto pred = fitted.predict(x_test, inner);

  CellResult cell;
  cell.model_id = model.id;
  cell.seed = seed;
  cell.train_size = parts.train.size();
  cell.test_size = parts.test.size();
  cell.importance.assign(x.cols(), 0.0);
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    cell.confusion[l] = confusion(y_test.column(l), pred.column(l));
    bool zd = false;
    cell.per_label[l] = macro_metrics(cell.confusion[l], &zd);
    cell.zero_division_events += zd ? 1 : 0;
    cell.label_importance[l] = fitted.per_label[l].importance;
    for (std::size_t f = 0; f < x.cols(); ++f) cell.importance[f] += cell.label_importance[l][f];
  }
  cell.averaged = multilabel_macro(cell.per_label);
  const double sum = std::accumulate(cell.importance.begin(), cell.importance.end(), 0.0);
  if (sum > 0) {
    for (auto& v : cell.importance) v /= sum;
  }
  return cell;
}

}  // namespace

ExperimentReport run_experiment(const FeatureMatrix& x, const LabelMatrix& y, const std::vector<ModelSpec>& models,
                                const SplitSpec& spec, Exec exec) {
  spec.validate();
  if (x.rows() != y.rows()) throw ValidationError("feature and label row counts differ");
  if (models.empty()) throw ValidationError("at least one model is required");

  ExperimentReport report;
  report.models = models;
  report.split = spec;
  report.dataset_rows = x.rows();
  report.feature_count = x.cols();

  const std::size_t seeds = spec.seeds.size();
  const std::size_t cells = models.size() * seeds;
  report.cells.resize(cells);
  std::vector<std::string> errors(cells);

  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t c = 0; c < cells; ++c) {
    const auto& model = models[c / seeds];
    const auto seed = spec.seeds[c % seeds];
    try {
      report.cells[c] = run_cell(x, y, model, seed, spec, Exec::serial);
    } catch (const std::exception& e) {
      errors[c] = "model " + model.id + ", seed " + std::to_string(seed) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ValidationError(e);
  }

  report.aggregates = aggregate(models, spec, report.cells);
  return report;
}

}  // namespace pss
