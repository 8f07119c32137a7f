#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pss {

enum class ComparisonMode { strict, inclusive };

enum class Factor { one = 1, two = 2 };

/// Scoring rules for a Likert questionnaire. The defaults are the 14-item
/// Perceived Stress Scale: seven reverse-scored items, two seven-item factors,
/// a total threshold of 28 and a per-factor threshold of 14.
///
/// Item indices are 1-based throughout, matching how questionnaires number
/// their questions.
struct ScaleDefinition {
  int item_count = 14;
  int max_item_value = 4;
  std::vector<int> reverse_items{4, 5, 6, 7, 9, 10, 13};
  std::vector<int> factor1_items{4, 5, 6, 8, 9, 10, 13};
  std::vector<int> factor2_items{1, 2, 3, 7, 11, 12, 14};
  int stress_threshold = 28;
  int factor_threshold = 14;
  ComparisonMode comparison_mode = ComparisonMode::strict;

  // Throws ValidationError naming the first violated invariant.
  void validate() const;

  bool is_reversed(int item_index) const;
  int max_total() const { return item_count * max_item_value; }
  int max_factor(Factor which) const;
  const std::vector<int>& factor_items(Factor which) const {
    return which == Factor::one ? factor1_items : factor2_items;
  }
};

ScaleDefinition load_scale(const std::filesystem::path& path);
ScaleDefinition scale_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScaleDefinition& scale);

/// Raw (pre-reversal) answers of one respondent.
struct ResponseSheet {
  std::vector<int> answers;

  bool operator==(const ResponseSheet&) const = default;
};

struct LabelTriple {
  std::uint8_t stress = 0;
  std::uint8_t factor1 = 0;
  std::uint8_t factor2 = 0;

  std::uint8_t operator[](std::size_t label) const {
    return label == 0 ? stress : (label == 1 ? factor1 : factor2);
  }
  bool operator==(const LabelTriple&) const = default;
};

inline constexpr std::size_t kLabelCount = 3;
inline constexpr std::array<const char*, kLabelCount> kLabelNames{"stres", "faktor_1", "faktor_2"};

struct ScoredRecord {
  int total_score = 0;
  int factor1_score = 0;
  int factor2_score = 0;
  LabelTriple labels;

  bool operator==(const ScoredRecord&) const = default;
};

int item_score(const ScaleDefinition& scale, int item_index, int raw);
int total_score(const ScaleDefinition& scale, const ResponseSheet& sheet);
int factor_score(const ScaleDefinition& scale, const ResponseSheet& sheet, Factor which);
LabelTriple derive_labels(const ScaleDefinition& scale, int total, int f1, int f2);
ScoredRecord score_sheet(const ScaleDefinition& scale, const ResponseSheet& sheet);

// Scores every sheet; all row problems are collected into one ValidationError
// ("row 3: ...") instead of stopping at the first.
std::vector<ScoredRecord> score_dataset(const ScaleDefinition& scale,
                                        std::span<const ResponseSheet> sheets);

// Throws ValidationError when the sheet has the wrong length or a value
// outside [0, max_item_value].
void validate_sheet(const ScaleDefinition& scale, const ResponseSheet& sheet);

}  // namespace pss
