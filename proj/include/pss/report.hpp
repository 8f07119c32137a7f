#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pss/eval.hpp"
#include "pss/ingest.hpp"

namespace pss {

/// Importance averaged over seeds per model, plus a cross-model ranking.
/// Question ids are 1-based (Q1..Q14).
struct ImportanceSummary {
  std::vector<std::string> model_ids;
  std::vector<std::vector<double>> mean;  // [model][feature]
  std::vector<std::vector<double>> std;   // [model][feature], sample std over seeds
  std::vector<double> global_mean;        // mean over models of `mean`
  std::vector<int> ranking;               // question ids, most important first
  std::vector<int> top_set;
  std::vector<int> bottom_set;
};

struct RankedListing {
  std::vector<int> top;     // most important first
  std::vector<int> bottom;  // least important first
};

// Orders question ids by descending importance; equal values keep the lower
// question id first, in both listings.
RankedListing rank_values(const std::vector<double>& importance, std::size_t k);
RankedListing rank_questions(const ImportanceSummary& summary, std::size_t k);

ImportanceSummary summarize_importance(const ExperimentReport& report, std::size_t k = 4);

// Cross-model mean importance for one seed (renormalized), for per-seed
// stability checks of the ranking.
std::vector<double> seed_importance(const ExperimentReport& report, std::size_t seed_index);

std::string question_id(int question);

// "92.53 ± 5.07": values are fractions, printed as percentages.
std::string format_mean_std(const MeanStd& value);

// Header lines naming every assumption a reader needs to interpret numbers.
std::vector<std::string> report_assumptions(const ExperimentReport& report);

std::string results_csv(const ExperimentReport& report);
std::string metrics_csv(const ExperimentReport& report);
std::string confusion_csv(const ExperimentReport& report, std::size_t model);
std::string importance_csv(const ImportanceSummary& summary);
std::string results_markdown(const ExperimentReport& report, const ImportanceSummary& summary);

std::string confusion_svg(const ExperimentReport& report, std::size_t model);
std::string importance_svg(const ImportanceSummary& summary);

// Score histograms (one panel per score column) and label counts.
std::string score_distribution_svg(std::span<const ScoredRecord> records, const ScaleDefinition& scale);
std::string label_distribution_svg(const SummaryStats& stats);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace pss
