#include "pss/scale.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pss/errors.hpp"

namespace pss {

namespace {

bool contains(const std::vector<int>& items, int index) {
  return std::find(items.begin(), items.end(), index) != items.end();
}

void check_item_set(const std::vector<int>& items, int item_count, const char* name) {
  std::set<int> seen;
  for (int i : items) {
    if (i < 1 || i > item_count) {
      throw ValidationError(std::string(name) + ": item " + std::to_string(i) + " outside [1," +
                            std::to_string(item_count) + "]");
    }
    if (!seen.insert(i).second) {
      throw ValidationError(std::string(name) + ": duplicate item " + std::to_string(i));
    }
  }
}

bool above(const ScaleDefinition& scale, int score, int threshold) {
  return scale.comparison_mode == ComparisonMode::strict ? score > threshold : score >= threshold;
}

}  // namespace

void ScaleDefinition::validate() const {
  if (item_count <= 0) throw ValidationError("item_count must be positive");
  if (max_item_value <= 0) throw ValidationError("max_item_value must be positive");
  check_item_set(reverse_items, item_count, "reverse_items");
  check_item_set(factor1_items, item_count, "factor1_items");
  check_item_set(factor2_items, item_count, "factor2_items");
  for (int i : factor1_items) {
    if (contains(factor2_items, i)) {
      throw ValidationError("factor1_items and factor2_items overlap at item " + std::to_string(i));
    }
  }
  if (static_cast<int>(factor1_items.size() + factor2_items.size()) != item_count) {
    throw ValidationError("factor1_items and factor2_items must cover every item exactly once");
  }
  if (stress_threshold < 0 || stress_threshold > max_total()) {
    throw ValidationError("stress_threshold outside score range");
  }
  if (factor_threshold < 0) throw ValidationError("factor_threshold must be non-negative");
}

bool ScaleDefinition::is_reversed(int item_index) const { return contains(reverse_items, item_index); }

int ScaleDefinition::max_factor(Factor which) const {
  return static_cast<int>(factor_items(which).size()) * max_item_value;
}

ScaleDefinition scale_from_json(const nlohmann::json& doc) {
  ScaleDefinition scale;
  if (!doc.is_object()) throw ValidationError("scale definition must be a JSON object");
  try {
    if (doc.contains("item_count")) scale.item_count = doc.at("item_count").get<int>();
    if (doc.contains("max_item_value")) scale.max_item_value = doc.at("max_item_value").get<int>();
    if (doc.contains("reverse_items")) scale.reverse_items = doc.at("reverse_items").get<std::vector<int>>();
    if (doc.contains("factor1_items")) scale.factor1_items = doc.at("factor1_items").get<std::vector<int>>();
    if (doc.contains("factor2_items")) scale.factor2_items = doc.at("factor2_items").get<std::vector<int>>();
    if (doc.contains("stress_threshold")) scale.stress_threshold = doc.at("stress_threshold").get<int>();
    if (doc.contains("factor_threshold")) scale.factor_threshold = doc.at("factor_threshold").get<int>();
    if (doc.contains("comparison_mode")) {
      const auto mode = doc.at("comparison_mode").get<std::string>();
      if (mode == "strict") {
        scale.comparison_mode = ComparisonMode::strict;
      } else if (mode == "inclusive") {
        scale.comparison_mode = ComparisonMode::inclusive;
      } else {
        throw ValidationError("comparison_mode must be \"strict\" or \"inclusive\", got \"" + mode + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scale definition: ") + e.what());
  }
  scale.validate();
  return scale;
}

ScaleDefinition load_scale(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scale file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scale file " + path.string() + ": " + e.what());
  }
  return scale_from_json(doc);
}

nlohmann::json to_json(const ScaleDefinition& scale) {
  return nlohmann::json{
      {"item_count", scale.item_count},
      {"max_item_value", scale.max_item_value},
      {"reverse_items", scale.reverse_items},
      {"factor1_items", scale.factor1_items},
      {"factor2_items", scale.factor2_items},
      {"stress_threshold", scale.stress_threshold},
      {"factor_threshold", scale.factor_threshold},
      {"comparison_mode", scale.comparison_mode == ComparisonMode::strict ? "strict" : "inclusive"},
  };
}

int item_score(const ScaleDefinition& scale, int item_index, int raw) {
  if (item_index < 1 || item_index > scale.item_count) {
    throw ValidationError("item_index " + std::to_string(item_index) + " outside [1," +
                          std::to_string(scale.item_count) + "]");
  }
  if (raw < 0 || raw > scale.max_item_value) {
    throw ValidationError("raw value " + std::to_string(raw) + " for item " + std::to_string(item_index) +
                          " outside [0," + std::to_string(scale.max_item_value) + "]");
  }
  return scale.is_reversed(item_index) ? scale.max_item_value - raw : raw;
}

void validate_sheet(const ScaleDefinition& scale, const ResponseSheet& sheet) {
  if (static_cast<int>(sheet.answers.size()) != scale.item_count) {
    throw ValidationError("expected " + std::to_string(scale.item_count) + " answers, got " +
                          std::to_string(sheet.answers.size()));
  }
  for (std::size_t i = 0; i < sheet.answers.size(); ++i) {
    const int v = sheet.answers[i];
    if (v < 0 || v > scale.max_item_value) {
      throw ValidationError("answer q" + std::to_string(i + 1) + " = " + std::to_string(v) +
                            " outside [0," + std::to_string(scale.max_item_value) + "]");
    }
  }
}

int total_score(const ScaleDefinition& scale, const ResponseSheet& sheet) {
  validate_sheet(scale, sheet);
  int sum = 0;
  for (int i = 1; i <= scale.item_count; ++i) sum += item_score(scale, i, sheet.answers[i - 1]);
  return sum;
}

int factor_score(const ScaleDefinition& scale, const ResponseSheet& sheet, Factor which) {
  validate_sheet(scale, sheet);
  int sum = 0;
  for (int i : scale.factor_items(which)) sum += item_score(scale, i, sheet.answers[i - 1]);
  return sum;
}

LabelTriple derive_labels(const ScaleDefinition& scale, int total, int f1, int f2) {
  if (total < 0 || total > scale.max_total()) {
    throw ValidationError("total score " + std::to_string(total) + " outside [0," +
                          std::to_string(scale.max_total()) + "]");
  }
  if (f1 < 0 || f1 > scale.max_factor(Factor::one)) {
    throw ValidationError("factor 1 score " + std::to_string(f1) + " out of range");
  }
  if (f2 < 0 || f2 > scale.max_factor(Factor::two)) {
    throw ValidationError("factor 2 score " + std::to_string(f2) + " out of range");
  }
  return LabelTriple{
      static_cast<std::uint8_t>(above(scale, total, scale.stress_threshold)),
      static_cast<std::uint8_t>(above(scale, f1, scale.factor_threshold)),
      static_cast<std::uint8_t>(above(scale, f2, scale.factor_threshold)),
  };
}

ScoredRecord score_sheet(const ScaleDefinition& scale, const ResponseSheet& sheet) {
  ScoredRecord r;
  r.factor1_score = factor_score(scale, sheet, Factor::one);
  r.factor2_score = factor_score(scale, sheet, Factor::two);
  r.total_score = total_score(scale, sheet);
  r.labels = derive_labels(scale, r.total_score, r.factor1_score, r.factor2_score);
  return r;
}

std::vector<ScoredRecord> score_dataset(const ScaleDefinition& scale, std::span<const ResponseSheet> sheets) {
  std::vector<ScoredRecord> out;
  out.reserve(sheets.size());
  std::ostringstream problems;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    try {
      out.push_back(score_sheet(scale, sheets[i]));
    } catch (const ValidationError& e) {
      if (bad++ > 0) problems << '\n';
      problems << "row " << (i + 1) << ": " << e.what();
    }
  }
  if (bad > 0) throw ValidationError(problems.str());
  return out;
}

}  // namespace pss
