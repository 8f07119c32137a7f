#include "pss/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pss/csv.hpp"
#include "pss/errors.hpp"

namespace pss {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string fold_answer_text(std::string_view text) {
  text = trim(text);
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
      continue;
    }
    if (i + 1 < text.size()) {
      const auto d = static_cast<unsigned char>(text[i + 1]);
      // Turkish capitals in UTF-8. Both I forms and dotless i fold to ASCII i,
      // so "SIK", "sık" and "sik" all match.
      if (c == 0xC3 && (d == 0x87 || d == 0x96 || d == 0x9C)) {
        out.push_back(static_cast<char>(c));
        out.push_back(static_cast<char>(d + 0x20));
        ++i;
        continue;
      }
      if ((c == 0xC4 || c == 0xC5) && d == 0x9E) {
        out.push_back(static_cast<char>(c));
        out.push_back(static_cast<char>(0x9F));
        ++i;
        continue;
      }
      if (c == 0xC4 && (d == 0xB0 || d == 0xB1)) {
        out.push_back('i');
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

LikertMapping::LikertMapping(std::vector<std::pair<std::string, int>> entries) {
  for (auto& [text, value] : entries) {
    if (value < 0) throw ValidationError("Likert mapping value for \"" + text + "\" is negative");
    auto key = fold_answer_text(text);
    if (key.empty()) throw ValidationError("Likert mapping contains an empty answer text");
    const bool dup = std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
    if (dup) throw ValidationError("Likert mapping lists \"" + text + "\" twice");
    entries_.emplace_back(std::move(key), value);
  }
}

LikertMapping LikertMapping::turkish_default() {
  return LikertMapping({
      {"hiçbir zaman", 0},
      {"neredeyse hiçbir zaman", 1},
      {"bazen", 2},
      {"oldukça sık", 3},
      {"çok sık", 4},
  });
}

LikertMapping LikertMapping::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("Likert mapping must be a JSON object of text -> level");
  std::vector<std::pair<std::string, int>> entries;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number_integer()) throw ValidationError("Likert mapping value for \"" + key + "\" is not an integer");
    entries.emplace_back(key, value.get<int>());
  }
  return LikertMapping(std::move(entries));
}

LikertMapping LikertMapping::load(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("Likert mapping " + path.string() + ": " + e.what());
  }
}

std::optional<int> LikertMapping::lookup(std::string_view text) const {
  const auto key = fold_answer_text(text);
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

Dataset parse_csv_text(std::string_view text, std::string source_name, const ScaleDefinition& scale,
                       const LikertMapping& mapping, const ColumnLayout& layout) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ValidationError("empty dataset");
  const auto& header = rows.front();

  std::vector<std::size_t> columns;
  if (layout.first_item_column) {
    const std::size_t first = *layout.first_item_column;
    if (first + scale.item_count > header.size()) {
      throw ValidationError("header has " + std::to_string(header.size()) + " columns; cannot take " +
                            std::to_string(scale.item_count) + " items from column " + std::to_string(first));
    }
    for (int i = 0; i < scale.item_count; ++i) columns.push_back(first + i);
  } else {
    std::vector<std::string> names = layout.item_columns;
    if (names.empty()) {
      for (int i = 1; i <= scale.item_count; ++i) names.push_back("q" + std::to_string(i));
    }
    if (static_cast<int>(names.size()) != scale.item_count) {
      throw ValidationError("layout names " + std::to_string(names.size()) + " item columns, scale has " +
                            std::to_string(scale.item_count));
    }
    for (const auto& name : names) {
      auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
      if (it == header.end()) throw ValidationError("header is missing column " + name);
      columns.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }

  Dataset ds;
  ds.source_name = std::move(source_name);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t file_row = r + 1;
    if (row.size() != header.size()) {
      throw ValidationError("row " + std::to_string(file_row) + ": expected " + std::to_string(header.size()) +
                            " columns, got " + std::to_string(row.size()));
    }
    ResponseSheet sheet;
    sheet.answers.reserve(columns.size());
    for (std::size_t col : columns) {
      const auto cell = trim(row[col]);
      const auto where = " at row " + std::to_string(file_row) + ", column " + std::string(trim(header[col]));
      if (cell.empty()) throw ValidationError("missing answer" + where);
      std::optional<int> value = parse_int(cell);
      if (value) {
        if (*value < 0 || *value > scale.max_item_value) {
          throw ValidationError("value out of range [0," + std::to_string(scale.max_item_value) + "]" + where);
        }
      } else {
        value = mapping.lookup(cell);
        if (!value) throw ValidationError("unknown answer text \"" + std::string(cell) + "\"" + where);
        if (*value > scale.max_item_value) {
          throw ValidationError("mapped value " + std::to_string(*value) + " out of range [0," +
                                std::to_string(scale.max_item_value) + "]" + where);
        }
      }
      sheet.answers.push_back(*value);
    }
    ds.sheets.push_back(std::move(sheet));
    ds.row_provenance.push_back(file_row);
  }
  return ds;
}

Dataset parse_csv(const std::filesystem::path& path, const ScaleDefinition& scale, const LikertMapping& mapping,
                  const ColumnLayout& layout) {
  return parse_csv_text(read_file(path), path.string(), scale, mapping, layout);
}

void write_csv(std::ostream& out, const ScaleDefinition& scale, std::span<const ResponseSheet> sheets,
               std::span<const ScoredRecord> records) {
  if (sheets.size() != records.size()) throw ValidationError("sheet and record counts differ");
  csv::Row header;
  for (int i = 1; i <= scale.item_count; ++i) header.push_back("q" + std::to_string(i));
  for (const char* name : {"skor", "faktor_1_skor", "faktor_2_skor", "stres", "faktor_1", "faktor_2"}) {
    header.emplace_back(name);
  }
  csv::write_row(out, header);
  for (std::size_t r = 0; r < sheets.size(); ++r) {
    csv::Row row;
    for (int a : sheets[r].answers) row.push_back(std::to_string(a));
    const auto& rec = records[r];
    row.push_back(std::to_string(rec.total_score));
    row.push_back(std::to_string(rec.factor1_score));
    row.push_back(std::to_string(rec.factor2_score));
    for (std::size_t l = 0; l < kLabelCount; ++l) row.push_back(std::to_string(rec.labels[l]));
    csv::write_row(out, row);
  }
}

void write_csv_file(const std::filesystem::path& path, const ScaleDefinition& scale,
                    std::span<const ResponseSheet> sheets, std::span<const ScoredRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out, scale, sheets, records);
  if (!out) throw IoError("write failed for " + path.string());
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("empty dataset");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

ColumnStats column_stats(std::vector<double> values) {
  ColumnStats s;
  s.count = values.size();
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.p25 = quantile_sorted(values, 0.25);
  s.p50 = quantile_sorted(values, 0.50);
  s.p75 = quantile_sorted(values, 0.75);
  return s;
}

}  // namespace

SummaryStats describe(std::span<const ScoredRecord> records) {
  if (records.empty()) throw ValidationError("empty dataset");
  std::vector<double> total, f1, f2;
  SummaryStats stats;
  for (const auto& r : records) {
    total.push_back(r.total_score);
    f1.push_back(r.factor1_score);
    f2.push_back(r.factor2_score);
    for (std::size_t l = 0; l < kLabelCount; ++l) ++stats.label_counts[l][r.labels[l]];
  }
  stats.total = column_stats(std::move(total));
  stats.factor1 = column_stats(std::move(f1));
  stats.factor2 = column_stats(std::move(f2));
  stats.single_record = records.size() == 1;
  return stats;
}

std::string format_summary(const SummaryStats& stats) {
  std::ostringstream out;
  auto line = [&](const char* name, auto get, int decimals) {
    out << name;
    for (const ColumnStats* c : {&stats.total, &stats.factor1, &stats.factor2}) {
      out << '\t' << csv::fixed(get(*c), decimals);
    }
    out << '\n';
  };
  out << "\tskor\tfaktor_1_skor\tfaktor_2_skor\n";
  line("count", [](const ColumnStats& c) { return static_cast<double>(c.count); }, 0);
  line("mean", [](const ColumnStats& c) { return c.mean; }, 2);
  line("std", [](const ColumnStats& c) { return c.std; }, 2);
  line("min", [](const ColumnStats& c) { return c.min; }, 0);
  line("25%", [](const ColumnStats& c) { return c.p25; }, 2);
  line("50%", [](const ColumnStats& c) { return c.p50; }, 2);
  line("75%", [](const ColumnStats& c) { return c.p75; }, 2);
  line("max", [](const ColumnStats& c) { return c.max; }, 0);
  out << "\n\tstres\tfaktor_1\tfaktor_2\n";
  for (int v = 0; v < 2; ++v) {
    out << v;
    for (std::size_t l = 0; l < kLabelCount; ++l) out << '\t' << stats.label_counts[l][v];
    out << '\n';
  }
  return out.str();
}

std::vector<Finding> validate_dataset(const Dataset& dataset, const ScaleDefinition& scale) {
  std::vector<Finding> findings;
  for (std::size_t i = 0; i < dataset.sheets.size(); ++i) {
    const std::size_t row = i < dataset.row_provenance.size() ? dataset.row_provenance[i] : i + 1;
    const auto& answers = dataset.sheets[i].answers;
    const auto prefix = "row " + std::to_string(row) + ": ";
    if (static_cast<int>(answers.size()) != scale.item_count) {
      findings.push_back({row, prefix + "expected " + std::to_string(scale.item_count) + " answers, got " +
                                   std::to_string(answers.size())});
    }
    for (std::size_t q = 0; q < answers.size(); ++q) {
      if (answers[q] < 0 || answers[q] > scale.max_item_value) {
        findings.push_back({row, prefix + "q" + std::to_string(q + 1) + " = " + std::to_string(answers[q]) +
                                     " outside [0," + std::to_string(scale.max_item_value) + "]"});
      }
    }
  }
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) { return a.row < b.row; });
  return findings;
}

}  // namespace pss
