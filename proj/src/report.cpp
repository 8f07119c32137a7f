#include "pss/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pss/csv.hpp"
#include "pss/errors.hpp"
#include "pss/model_io.hpp"
#include "pss/svg.hpp"

namespace pss {

namespace {

void renormalize(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (sum > 0) {
    for (auto& x : v) x /= sum;
  }
}

std::string model_title(const ModelSpec& spec) {
  if (spec.id == "dt") return "Decision tree";
  if (spec.id == "rf") return "Random forest";
  if (spec.id == "ada") return "AdaBoost (SAMME)";
  if (spec.id == "gb") return "Gradient boosting";
  if (spec.id == "gb2") return "Gradient boosting, second-order gain";
  return std::string(to_string(spec.kind));
}

}  // namespace

std::string question_id(int question) { return "Q" + std::to_string(question); }

RankedListing rank_values(const std::vector<double>& importance, std::size_t k) {
  if (k < 1 || k > importance.size()) {
    throw ValidationError("k must lie in [1," + std::to_string(importance.size()) + "]");
  }
  std::vector<int> ids(importance.size());
  std::iota(ids.begin(), ids.end(), 1);
  auto desc = ids;
  std::stable_sort(desc.begin(), desc.end(), [&](int a, int b) { return importance[a - 1] > importance[b - 1]; });
  auto asc = ids;
  std::stable_sort(asc.begin(), asc.end(), [&](int a, int b) { return importance[a - 1] < importance[b - 1]; });
  RankedListing out;
  out.top.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(k));
  out.bottom.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

RankedListing rank_questions(const ImportanceSummary& summary, std::size_t k) {
  return rank_values(summary.global_mean, k);
}

ImportanceSummary summarize_importance(const ExperimentReport& report, std::size_t k) {
  ImportanceSummary s;
  const std::size_t features = report.feature_count;
  const std::size_t seeds = report.split.seeds.size();
  s.global_mean.assign(features, 0.0);
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    s.model_ids.push_back(report.models[m].id);
    std::vector<double> mean(features, 0.0), sd(features, 0.0);
    for (std::size_t f = 0; f < features; ++f) {
      std::vector<double> per_seed;
      for (std::size_t r = 0; r < seeds; ++r) per_seed.push_back(report.cell(m, r).importance[f]);
      const auto ms = mean_std(per_seed);
      mean[f] = ms.mean;
      sd[f] = ms.std;
    }
    renormalize(mean);
    for (std::size_t f = 0; f < features; ++f) s.global_mean[f] += mean[f] / static_cast<double>(report.models.size());
    s.mean.push_back(std::move(mean));
    s.std.push_back(std::move(sd));
  }
  std::vector<int> ids(features);
  std::iota(ids.begin(), ids.end(), 1);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return s.global_mean[a - 1] > s.global_mean[b - 1]; });
  s.ranking = ids;
  const auto listing = rank_values(s.global_mean, std::min(k, features));
  s.top_set = listing.top;
  s.bottom_set = listing.bottom;
  return s;
}

std::vector<double> seed_importance(const ExperimentReport& report, std::size_t seed_index) {
  std::vector<double> v(report.feature_count, 0.0);
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    const auto& imp = report.cell(m, seed_index).importance;
    for (std::size_t f = 0; f < v.size(); ++f) v[f] += imp[f];
  }
  renormalize(v);
  return v;
}

std::string format_mean_std(const MeanStd& value) {
  return csv::fixed(100.0 * value.mean, 2) + " \xC2\xB1 " + csv::fixed(100.0 * value.std, 2);
}

std::vector<std::string> report_assumptions(const ExperimentReport& report) {
  std::string seeds;
  for (std::size_t i = 0; i < report.split.seeds.size(); ++i) {
    if (i) seeds += ",";
    seeds += std::to_string(report.split.seeds[i]);
  }
  const auto test_pct = csv::fixed(100.0 * report.split.test_fraction, 0);
  const auto train_pct = csv::fixed(100.0 * (1.0 - report.split.test_fraction), 0);
  return {
      "Split: repeated random subsampling, " + train_pct + "/" + test_pct + " train/test, stratified on " +
          kLabelNames[report.split.stratify_on] + ", seeds " + seeds + " (assumed ratio).",
      "Metrics: macro over the two classes per label, then unweighted mean over the 3 labels; 0/0 counts as 0.",
      "Aggregates: mean \xC2\xB1 sample std over seeds, in percent.",
      "Models: hyperparameters are library-style defaults (assumed); gb2 is gradient boosting with a regularized "
      "second-order split gain, standing in for XGBoost/CatBoost-style boosting.",
      "Importance: impurity decrease times node weight fraction, AdaBoost members weighted by alpha, normalized "
      "per model and averaged over labels and seeds.",
  };
}

std::string results_csv(const ExperimentReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"model", "precision", "recall", "f1"});
  for (const auto& a : report.aggregates) {
    csv::write_row(out, {a.model_id, format_mean_std(a.precision), format_mean_std(a.recall), format_mean_std(a.f1)});
  }
  return out.str();
}

std::string metrics_csv(const ExperimentReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"model", "seed", "label", "metric", "value"});
  auto emit = [&](const CellResult& c, const std::string& label, const MetricTriple& t) {
    const auto seed = std::to_string(c.seed);
    csv::write_row(out, {c.model_id, seed, label, "macro_precision", csv::shortest(t.precision)});
    csv::write_row(out, {c.model_id, seed, label, "macro_recall", csv::shortest(t.recall)});
    csv::write_row(out, {c.model_id, seed, label, "macro_f1", csv::shortest(t.f1)});
  };
  for (const auto& c : report.cells) {
    for (std::size_t l = 0; l < kLabelCount; ++l) emit(c, kLabelNames[l], c.per_label[l]);
    emit(c, "mean", c.averaged);
  }
  return out.str();
}

std::string confusion_csv(const ExperimentReport& report, std::size_t model) {
  std::ostringstream out;
  csv::write_row(out, {"model", "seed", "label", "tp", "fp", "fn", "tn"});
  for (std::size_t s = 0; s < report.split.seeds.size(); ++s) {
    const auto& c = report.cell(model, s);
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      const auto& cm = c.confusion[l];
      csv::write_row(out, {c.model_id, std::to_string(c.seed), kLabelNames[l], std::to_string(cm.tp),
                           std::to_string(cm.fp), std::to_string(cm.fn), std::to_string(cm.tn)});
    }
  }
  return out.str();
}

std::string importance_csv(const ImportanceSummary& summary) {
  std::ostringstream out;
  csv::Row header{"question"};
  for (const auto& id : summary.model_ids) {
    header.push_back(id + "_mean");
    header.push_back(id + "_std");
  }
  header.push_back("mean");
  header.push_back("rank");
  csv::write_row(out, header);
  for (std::size_t f = 0; f < summary.global_mean.size(); ++f) {
    csv::Row row{question_id(static_cast<int>(f) + 1)};
    for (std::size_t m = 0; m < summary.model_ids.size(); ++m) {
      row.push_back(csv::fixed(summary.mean[m][f], 6));
      row.push_back(csv::fixed(summary.std[m][f], 6));
    }
    row.push_back(csv::fixed(summary.global_mean[f], 6));
    const auto pos = std::find(summary.ranking.begin(), summary.ranking.end(), static_cast<int>(f) + 1);
    row.push_back(std::to_string(pos - summary.ranking.begin() + 1));
    csv::write_row(out, row);
  }
  return out.str();
}

std::string results_markdown(const ExperimentReport& report, const ImportanceSummary& summary) {
  std::ostringstream out;
  out << "# Perceived stress experiment report\n\n";
  out << "Dataset rows: " << report.dataset_rows << ", features: " << report.feature_count << "\n\n";
  for (const auto& a : report_assumptions(report)) out << "- " << a << "\n";

  out << "\n## Results (mean \xC2\xB1 std over " << report.split.seeds.size() << " seeds, %)\n\n";
  out << "| Model | Precision | Recall | F1 |\n|---|---|---|---|\n";
  for (const auto& a : report.aggregates) {
    out << "| " << a.model_id << " | " << format_mean_std(a.precision) << " | " << format_mean_std(a.recall) << " | "
        << format_mean_std(a.f1) << " |\n";
  }

  out << "\n## Question importance\n\n";
  auto ids = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + question_id(v[i]);
    return s;
  };
  out << "Most important: " << ids(summary.top_set) << "  \nLeast important: " << ids(summary.bottom_set) << "\n\n";
  out << "| Question |";
  for (const auto& id : summary.model_ids) out << ' ' << id << " |";
  out << " mean | rank |\n|---|";
  for (std::size_t m = 0; m < summary.model_ids.size(); ++m) out << "---|";
  out << "---|---|\n";
  for (std::size_t f = 0; f < summary.global_mean.size(); ++f) {
    out << "| " << question_id(static_cast<int>(f) + 1) << " |";
    for (std::size_t m = 0; m < summary.model_ids.size(); ++m) out << ' ' << csv::fixed(summary.mean[m][f], 4) << " |";
    const auto pos = std::find(summary.ranking.begin(), summary.ranking.end(), static_cast<int>(f) + 1);
    out << ' ' << csv::fixed(summary.global_mean[f], 4) << " | " << (pos - summary.ranking.begin() + 1) << " |\n";
  }

  for (std::size_t m = 0; m < report.models.size(); ++m) {
    const auto& spec = report.models[m];
    out << "\n## " << spec.id << ": " << model_title(spec) << "\n\n";
    out << "Confusion matrices per seed as tp/fp/fn/tn.\n\n| Seed |";
    for (const char* name : kLabelNames) out << ' ' << name << " |";
    out << " macro F1 |\n|---|---|---|---|---|\n";
    for (std::size_t s = 0; s < report.split.seeds.size(); ++s) {
      const auto& c = report.cell(m, s);
      out << "| " << c.seed << " |";
      for (const auto& cm : c.confusion) out << ' ' << cm.tp << '/' << cm.fp << '/' << cm.fn << '/' << cm.tn << " |";
      out << ' ' << csv::fixed(100.0 * c.averaged.f1, 2) << " |\n";
    }
  }
  return out.str();
}

std::string confusion_svg(const ExperimentReport& report, std::size_t model) {
  const std::size_t seeds = report.split.seeds.size();
  const double cell = 46, gap = 40, left = 90, top = 70;
  const double block = 2 * cell;
  const double width = left + kLabelCount * (block + gap) + 10;
  const double height = top + static_cast<double>(seeds) * (block + gap) + 10;
  svg::Document doc(width, height);
  const auto& spec = report.models[model];
  doc.text(10, 24, spec.id + ": " + model_title(spec) + ", confusion matrices", 16, "start", "#222", true);
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    doc.text(left + static_cast<double>(l) * (block + gap) + cell, top - 22, kLabelNames[l], 13, "middle", "#222", true);
  }
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto& c = report.cell(model, s);
    const double y0 = top + static_cast<double>(s) * (block + gap);
    doc.text(10, y0 + cell + 4, "seed " + std::to_string(c.seed), 12);
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      const double x0 = left + static_cast<double>(l) * (block + gap);
      const auto& cm = c.confusion[l];
      const std::size_t grid[2][2] = {{cm.tn, cm.fp}, {cm.fn, cm.tp}};
      const double total = std::max<double>(1.0, static_cast<double>(cm.total()));
      for (int t = 0; t < 2; ++t) {
        for (int p = 0; p < 2; ++p) {
          const double share = static_cast<double>(grid[t][p]) / total;
          doc.rect(x0 + p * cell, y0 + t * cell, cell, cell, svg::blue_scale(share), "#888");
          doc.text(x0 + p * cell + cell / 2, y0 + t * cell + cell / 2 + 5, std::to_string(grid[t][p]), 14, "middle",
                   share > 0.5 ? "#fff" : "#222");
        }
      }
      doc.text(x0 + cell / 2, y0 - 4, "pred 0", 9, "middle", "#666");
      doc.text(x0 + cell * 1.5, y0 - 4, "pred 1", 9, "middle", "#666");
      doc.vertical_text(x0 - 6, y0 + cell / 2, "true 0", 9);
      doc.vertical_text(x0 - 6, y0 + cell * 1.5, "true 1", 9);
    }
  }
  return doc.str();
}

namespace {

void bar_panel(svg::Document& doc, double x0, double y0, double w, double h, const std::string& title,
               const std::vector<double>& values, const std::vector<std::string>& labels) {
  doc.text(x0, y0 - 8, title, 13, "start", "#222", true);
  doc.line(x0, y0 + h, x0 + w, y0 + h, "#444");
  const double vmax = std::max(1e-12, *std::max_element(values.begin(), values.end()));
  const double slot = w / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double bh = h * values[i] / vmax;
    doc.rect(x0 + static_cast<double>(i) * slot + slot * 0.15, y0 + h - bh, slot * 0.7, bh, "#3b6ea8");
    doc.text(x0 + (static_cast<double>(i) + 0.5) * slot, y0 + h + 14, labels[i], 10, "middle");
  }
  doc.text(x0 - 4, y0 + 4, csv::fixed(vmax, 3), 9, "end", "#666");
  doc.text(x0 - 4, y0 + h, "0", 9, "end", "#666");
}

}  // namespace

std::string importance_svg(const ImportanceSummary& summary) {
  const std::size_t panels = summary.model_ids.size() + 1;
  const double w = 560, h = 120, left = 50, top = 50, gap = 60;
  svg::Document doc(left + w + 20, top + static_cast<double>(panels) * (h + gap));
  doc.text(10, 24, "Mean question importance over seeds", 16, "start", "#222", true);
  std::vector<std::string> labels;
  for (std::size_t f = 0; f < summary.global_mean.size(); ++f) labels.push_back(question_id(static_cast<int>(f) + 1));
  for (std::size_t m = 0; m < summary.model_ids.size(); ++m) {
    bar_panel(doc, left, top + static_cast<double>(m) * (h + gap), w, h, summary.model_ids[m], summary.mean[m], labels);
  }
  bar_panel(doc, left, top + static_cast<double>(panels - 1) * (h + gap), w, h, "all models", summary.global_mean,
            labels);
  return doc.str();
}

std::string score_distribution_svg(std::span<const ScoredRecord> records, const ScaleDefinition& scale) {
  const double w = 560, h = 120, left = 50, top = 50, gap = 60;
  svg::Document doc(left + w + 20, top + 3 * (h + gap));
  doc.text(10, 24, "Score distributions", 16, "start", "#222", true);
  struct Column {
    const char* name;
    int max;
    int ScoredRecord::*field;
  };
  const Column columns[] = {{"skor", scale.max_total(), &ScoredRecord::total_score},
                            {"faktor_1_skor", scale.max_factor(Factor::one), &ScoredRecord::factor1_score},
                            {"faktor_2_skor", scale.max_factor(Factor::two), &ScoredRecord::factor2_score}};
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> counts(static_cast<std::size_t>(columns[c].max) + 1, 0.0);
    for (const auto& r : records) counts[static_cast<std::size_t>(r.*(columns[c].field))] += 1.0;
    std::vector<std::string> labels(counts.size());
    for (std::size_t v = 0; v < counts.size(); v += (counts.size() > 30 ? 4 : 2)) labels[v] = std::to_string(v);
    bar_panel(doc, left, top + static_cast<double>(c) * (h + gap), w, h, columns[c].name, counts, labels);
  }
  return doc.str();
}

std::string label_distribution_svg(const SummaryStats& stats) {
  const double w = 160, h = 120, left = 40, top = 50, gap = 50;
  svg::Document doc(left + 3 * (w + gap), top + h + 40);
  doc.text(10, 24, "Label distributions", 16, "start", "#222", true);
  for (std::size_t l = 0; l < kLabelCount; ++l) {
    std::vector<double> counts{static_cast<double>(stats.label_counts[l][0]),
                               static_cast<double>(stats.label_counts[l][1])};
    bar_panel(doc, left + static_cast<double>(l) * (w + gap), top, w, h, kLabelNames[l], counts, {"0", "1"});
  }
  return doc.str();
}

namespace {

nlohmann::json metrics_json(const MetricTriple& t) {
  return {{"macro_precision", t.precision}, {"macro_recall", t.recall}, {"macro_f1", t.f1}};
}

MetricTriple metrics_from(const nlohmann::json& j) {
  return {j.at("macro_precision").get<double>(), j.at("macro_recall").get<double>(), j.at("macro_f1").get<double>()};
}

nlohmann::json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

MeanStd mean_std_from(const nlohmann::json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : report.models) models.push_back(to_json(m));
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json labels = nlohmann::json::object();
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      const auto& cm = c.confusion[l];
      auto entry = metrics_json(c.per_label[l]);
      entry["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
      entry["importance"] = c.label_importance[l];
      labels[kLabelNames[l]] = std::move(entry);
    }
    cells.push_back({{"model", c.model_id},
                     {"seed", c.seed},
                     {"train_size", c.train_size},
                     {"test_size", c.test_size},
                     {"labels", std::move(labels)},
                     {"averaged", metrics_json(c.averaged)},
                     {"importance", c.importance},
                     {"zero_division_events", c.zero_division_events}});
  }
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"model", a.model_id},
                          {"precision", mean_std_json(a.precision)},
                          {"recall", mean_std_json(a.recall)},
                          {"f1", mean_std_json(a.f1)}});
  }
  return {{"format_version", 1},
          {"dataset_rows", report.dataset_rows},
          {"feature_count", report.feature_count},
          {"split",
           {{"test_fraction", report.split.test_fraction},
            {"seeds", report.split.seeds},
            {"stratify_on", kLabelNames[report.split.stratify_on]}}},
          {"models", std::move(models)},
          {"cells", std::move(cells)},
          {"aggregates", std::move(aggregates)}};
}

ExperimentReport report_from_json(const nlohmann::json& doc) {
  try {
    ExperimentReport r;
    r.dataset_rows = doc.at("dataset_rows").get<std::size_t>();
    r.feature_count = doc.at("feature_count").get<std::size_t>();
    const auto& sp = doc.at("split");
    r.split.test_fraction = sp.at("test_fraction").get<double>();
    r.split.seeds = sp.at("seeds").get<std::vector<std::uint64_t>>();
    const auto strat = sp.at("stratify_on").get<std::string>();
    const auto it = std::find(kLabelNames.begin(), kLabelNames.end(), strat);
    if (it == kLabelNames.end()) throw ValidationError("unknown stratify_on label " + strat);
    r.split.stratify_on = static_cast<std::size_t>(it - kLabelNames.begin());
    for (const auto& m : doc.at("models")) r.models.push_back(model_spec_from_json(m));
    for (const auto& jc : doc.at("cells")) {
      CellResult c;
      c.model_id = jc.at("model").get<std::string>();
      c.seed = jc.at("seed").get<std::uint64_t>();
      c.train_size = jc.at("train_size").get<std::size_t>();
      c.test_size = jc.at("test_size").get<std::size_t>();
      for (std::size_t l = 0; l < kLabelCount; ++l) {
        const auto& jl = jc.at("labels").at(kLabelNames[l]);
        c.per_label[l] = metrics_from(jl);
        const auto& cm = jl.at("confusion");
        c.confusion[l] = {cm.at("tp").get<std::size_t>(), cm.at("fp").get<std::size_t>(),
                          cm.at("fn").get<std::size_t>(), cm.at("tn").get<std::size_t>()};
        c.label_importance[l] = jl.at("importance").get<std::vector<double>>();
      }
      c.averaged = metrics_from(jc.at("averaged"));
      c.importance = jc.at("importance").get<std::vector<double>>();
      c.zero_division_events = jc.at("zero_division_events").get<std::size_t>();
      r.cells.push_back(std::move(c));
    }
    for (const auto& ja : doc.at("aggregates")) {
      r.aggregates.push_back({ja.at("model").get<std::string>(), mean_std_from(ja.at("precision")),
                              mean_std_from(ja.at("recall")), mean_std_from(ja.at("f1"))});
    }
    if (r.cells.size() != r.models.size() * r.split.seeds.size()) {
      throw ValidationError("report has " + std::to_string(r.cells.size()) + " cells, expected models x seeds");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report document: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace pss
