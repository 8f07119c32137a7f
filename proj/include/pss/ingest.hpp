#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pss/scale.hpp"

namespace pss {

/// Maps free-text Likert answers to integer levels. Lookups trim surrounding
/// whitespace and case-fold (ASCII plus the Turkish capitals Ç Ğ İ Ö Ş Ü);
/// dotted and dotless i are treated as the same letter.
class LikertMapping {
 public:
  LikertMapping() = default;
  explicit LikertMapping(std::vector<std::pair<std::string, int>> entries);

  // Five-point Turkish frequency wording used by the adapted stress scale.
  static LikertMapping turkish_default();
  static LikertMapping from_json(const nlohmann::json& doc);
  static LikertMapping load(const std::filesystem::path& path);

  std::optional<int> lookup(std::string_view text) const;
  const std::vector<std::pair<std::string, int>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, int>> entries_;  // keys stored normalized
};

std::string fold_answer_text(std::string_view text);

/// Which CSV columns hold the item answers. By default columns are looked up
/// by header name (q1..q14); with `first_item_column` set the answers are the
/// item_count consecutive columns starting at that 0-based position, which
/// suits form exports whose headers are the question wording.
struct ColumnLayout {
  std::vector<std::string> item_columns;  // empty: q1..qN
  std::optional<std::size_t> first_item_column;
};

struct Dataset {
  std::vector<ResponseSheet> sheets;
  std::string source_name;
  std::vector<std::size_t> row_provenance;  // 1-based file row (header is row 1)

  std::size_t size() const { return sheets.size(); }
};

Dataset parse_csv(const std::filesystem::path& path, const ScaleDefinition& scale,
                  const LikertMapping& mapping = LikertMapping::turkish_default(),
                  const ColumnLayout& layout = {});
Dataset parse_csv_text(std::string_view text, std::string source_name, const ScaleDefinition& scale,
                       const LikertMapping& mapping = LikertMapping::turkish_default(),
                       const ColumnLayout& layout = {});

// Canonical layout: q1..qN, skor, faktor_1_skor, faktor_2_skor, stres,
// faktor_1, faktor_2.
void write_csv(std::ostream& out, const ScaleDefinition& scale, std::span<const ResponseSheet> sheets,
               std::span<const ScoredRecord> records);
void write_csv_file(const std::filesystem::path& path, const ScaleDefinition& scale,
                    std::span<const ResponseSheet> sheets, std::span<const ScoredRecord> records);

struct ColumnStats {
  std::size_t count = 0;
  double mean = 0, std = 0, min = 0, p25 = 0, p50 = 0, p75 = 0, max = 0;
};

struct SummaryStats {
  ColumnStats total, factor1, factor2;
  // label_counts[label][value]
  std::array<std::array<std::size_t, 2>, kLabelCount> label_counts{};
  bool single_record = false;  // std reported as 0
};

// Linear interpolation between closest order statistics, on sorted input.
double quantile_sorted(std::span<const double> sorted, double q);

// Sample (n-1) standard deviation; 0 for a single record.
SummaryStats describe(std::span<const ScoredRecord> records);

// Summary text block: rows count/mean/std/min/25%/50%/75%/max.
std::string format_summary(const SummaryStats& stats);

struct Finding {
  std::size_t row;
  std::string message;
};

// Every violated sheet invariant, ordered by row. Empty means valid.
std::vector<Finding> validate_dataset(const Dataset& dataset, const ScaleDefinition& scale);

}  // namespace pss
