#include "pss/run.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pss/errors.hpp"
#include "pss/model_io.hpp"

namespace pss {

EmitFlags parse_emit(std::string_view list) {
  EmitFlags flags{false, false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    auto item = list.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "csv") {
      flags.csv = true;
    } else if (item == "json") {
      flags.json = true;
    } else if (item == "markdown" || item == "md") {
      flags.markdown = true;
    } else if (item == "svg") {
      flags.svg = true;
    } else if (!item.empty()) {
      throw ValidationError("unknown --emit format \"" + std::string(item) + "\" (csv, json, markdown, svg)");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return flags;
}

std::vector<ModelSpec> default_models() {
  std::vector<ModelSpec> models;
  for (const auto& id : known_model_ids()) models.push_back(default_spec(id));
  return models;
}

void RunConfig::validate() const {
  scale.validate();
  if (input_path.has_value() == profile.has_value()) {
    throw ValidationError("exactly one of an input dataset or a synth profile must be given");
  }
  if (profile) profile->validate(scale);
  if (models.empty()) throw ValidationError("at least one model is required");
  for (std::size_t i = 0; i < models.size(); ++i) {
    models[i].params.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (models[j].id == models[i].id) throw ValidationError("model \"" + models[i].id + "\" listed twice");
    }
  }
  split.validate();
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : c.models) models.push_back(to_json(m));
  nlohmann::json doc{
      {"scale", to_json(c.scale)},
      {"models", std::move(models)},
      {"split",
       {{"test_fraction", c.split.test_fraction},
        {"seeds", c.split.seeds},
        {"stratify_on", kLabelNames[c.split.stratify_on]}}},
      {"emit", {{"csv", c.emit.csv}, {"json", c.emit.json}, {"markdown", c.emit.markdown}, {"svg", c.emit.svg}}},
      {"save_models", c.save_models},
  };
  if (c.input_path) {
    nlohmann::json mapping = nlohmann::json::object();
    for (const auto& [text, value] : c.mapping.entries()) mapping[text] = value;
    nlohmann::json layout = nlohmann::json::object();
    layout["item_columns"] = c.layout.item_columns;
    layout["first_item_column"] =
        c.layout.first_item_column ? nlohmann::json(*c.layout.first_item_column) : nlohmann::json(nullptr);
    doc["input"] = {{"path", *c.input_path}, {"likert_mapping", std::move(mapping)}, {"layout", std::move(layout)}};
  } else {
    doc["synth_profile"] = to_json(*c.profile);
  }
  return doc;
}

RunConfig config_from_json(const nlohmann::json& doc) {
  try {
    RunConfig c;
    c.scale = scale_from_json(doc.at("scale"));
    for (const auto& m : doc.at("models")) c.models.push_back(model_spec_from_json(m));
    const auto& sp = doc.at("split");
    c.split.test_fraction = sp.at("test_fraction").get<double>();
    c.split.seeds = sp.at("seeds").get<std::vector<std::uint64_t>>();
    const auto strat = sp.at("stratify_on").get<std::string>();
    const auto it = std::find(kLabelNames.begin(), kLabelNames.end(), strat);
    if (it == kLabelNames.end()) throw ValidationError("unknown stratify_on label " + strat);
    c.split.stratify_on = static_cast<std::size_t>(it - kLabelNames.begin());
    const auto& emit = doc.at("emit");
    c.emit = {emit.at("csv").get<bool>(), emit.at("json").get<bool>(), emit.at("markdown").get<bool>(),
              emit.at("svg").get<bool>()};
    c.save_models = doc.at("save_models").get<bool>();
    if (doc.contains("input")) {
      const auto& in = doc.at("input");
      c.input_path = in.at("path").get<std::string>();
      c.mapping = LikertMapping::from_json(in.at("likert_mapping"));
      const auto& layout = in.at("layout");
      c.layout.item_columns = layout.at("item_columns").get<std::vector<std::string>>();
      if (!layout.at("first_item_column").is_null()) {
        c.layout.first_item_column = layout.at("first_item_column").get<std::size_t>();
      }
    }
    if (doc.contains("synth_profile")) c.profile = profile_from_json(doc.at("synth_profile"));
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("run configuration: ") + e.what());
  }
}

RunConfig config_from_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.contains("config")) throw ValidationError("manifest " + path.string() + " has no config block");
  RunConfig c = config_from_json(doc.at("config"));
  if (doc.contains("dataset") && doc.at("dataset").contains("content_hash")) {
    c.expected_dataset_hash = doc.at("dataset").at("content_hash").get<std::string>();
  }
  return c;
}

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

LoadedData load_run_data(const RunConfig& config) {
  LoadedData data;
  if (config.input_path) {
    data.dataset = parse_csv(*config.input_path, config.scale, config.mapping, config.layout);
  } else {
    data.dataset = synth_generate(*config.profile, config.scale);
  }
  if (data.dataset.sheets.empty()) throw ValidationError("empty dataset");
  data.records = score_dataset(config.scale, data.dataset.sheets);
  std::ostringstream csv_text;
  write_csv(csv_text, config.scale, data.dataset.sheets, data.records);
  data.canonical_csv = csv_text.str();
  return data;
}

RunOutputs execute_run(const RunConfig& config) {
  config.validate();
  const auto data = load_run_data(config);
  const auto data_hash = fnv1a64_hex(data.canonical_csv);
  if (config.expected_dataset_hash && *config.expected_dataset_hash != data_hash) {
    throw ValidationError("dataset content hash " + data_hash + " differs from the manifest's " +
                          *config.expected_dataset_hash);
  }

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec || !std::filesystem::is_directory(config.out_dir)) {
    throw IoError("cannot create output directory " + config.out_dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }

  const auto x = FeatureMatrix::from_sheets(data.dataset.sheets, config.scale);
  const auto y = LabelMatrix::from_records(data.records);

  RunOutputs out;
  out.report = run_experiment(x, y, config.models, config.split, config.exec);
  out.importance = summarize_importance(out.report);

  auto write = [&](const std::string& name, const std::string& content) {
    write_text_file(config.out_dir / name, content);
    out.files.push_back(name);
  };

  if (config.emit.csv) {
    write("dataset.csv", data.canonical_csv);
    write("results.csv", results_csv(out.report));
    write("metrics.csv", metrics_csv(out.report));
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      write("confusion_" + config.models[m].id + ".csv", confusion_csv(out.report, m));
    }
    write("importance.csv", importance_csv(out.importance));
  }
  if (config.emit.svg) {
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      write("confusion_" + config.models[m].id + ".svg", confusion_svg(out.report, m));
    }
    write("importance.svg", importance_svg(out.importance));
  }
  if (config.emit.markdown) write("results.md", results_markdown(out.report, out.importance));
  if (config.emit.json) write("report.json", report_to_json(out.report).dump(1) + "\n");

  if (config.save_models) {
    // Final models are refit on the full dataset, one file per model id.
    for (const auto& spec : config.models) {
      const auto model = fit_multioutput(spec, x, y, config.exec);
      const auto name = "model_" + spec.id + ".json";
      save_model(config.out_dir / name, model);
      out.files.push_back(name);
    }
  }

  const auto cfg = config_to_json(config);
  nlohmann::json manifest{
      {"artifact", kArtifactName},
      {"version", kArtifactVersion},
      {"config", cfg},
      {"config_hash", fnv1a64_hex(cfg.dump())},
      {"dataset",
       {{"source", data.dataset.source_name}, {"rows", data.dataset.size()}, {"content_hash", data_hash}}},
      {"assumptions", report_assumptions(out.report)},
      {"outputs", out.files},
  };
  write_text_file(config.out_dir / "manifest.json", manifest.dump(1) + "\n");
  out.files.push_back("manifest.json");
  return out;
}

}  // namespace pss
