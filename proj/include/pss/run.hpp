#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pss/eval.hpp"
#include "pss/ingest.hpp"
#include "pss/report.hpp"
#include "pss/synth.hpp"

namespace pss {

inline constexpr std::string_view kArtifactName = "pss-workbench";
inline constexpr std::string_view kArtifactVersion = "0.1.0";

struct EmitFlags {
  bool csv = true;
  bool json = true;
  bool markdown = true;
  bool svg = true;
};

// Parses "csv,json,markdown,svg" (any subset; "md" is accepted for markdown).
EmitFlags parse_emit(std::string_view list);

/// Everything needed to reproduce a run. Exactly one of `input_path` and
/// `profile` is set. `out_dir` and `exec` do not affect results and are not
/// recorded in the manifest.
struct RunConfig {
  ScaleDefinition scale;
  std::optional<std::string> input_path;
  std::optional<SynthProfile> profile;
  LikertMapping mapping = LikertMapping::turkish_default();
  ColumnLayout layout;
  std::vector<ModelSpec> models;
  SplitSpec split;
  EmitFlags emit;
  bool save_models = false;

  std::filesystem::path out_dir = "pss_out";
  Exec exec = Exec::parallel;
  std::optional<std::string> expected_dataset_hash;  // set when replaying a manifest

  void validate() const;
};

std::vector<ModelSpec> default_models();

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& doc);
// Reads the "config" block of a manifest and pins the dataset hash.
RunConfig config_from_manifest(const std::filesystem::path& path);

// FNV-1a, 64 bit, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

struct LoadedData {
  Dataset dataset;
  std::vector<ScoredRecord> records;
  std::string canonical_csv;
};

LoadedData load_run_data(const RunConfig& config);

struct RunOutputs {
  ExperimentReport report;
  ImportanceSummary importance;
  std::vector<std::string> files;  // names relative to out_dir, in write order
};

RunOutputs execute_run(const RunConfig& config);

}  // namespace pss
