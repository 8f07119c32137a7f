// pss: score stress-scale responses, generate synthetic cohorts, run the
// repeated-split model comparison and rank questions by importance.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pss/csv.hpp"
#include "pss/errors.hpp"
#include "pss/ingest.hpp"
#include "pss/report.hpp"
#include "pss/run.hpp"
#include "pss/synth.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

const char* kAssumptions =
    "Assumptions behind the defaults:\n"
    "  - labels use strict comparison: stres = skor > 28, faktor_k = faktor_k_skor > 14\n"
    "    (scale file key comparison_mode: strict | inclusive)\n"
    "  - evaluation: repeated random subsampling, 80/20 split stratified on stres, seeds 0..4\n"
    "  - macro metrics: per-class mean over the 2 classes, then mean over the 3 labels; 0/0 -> 0\n"
    "  - model defaults: dt unlimited depth; rf 100 trees, sqrt features, bootstrap;\n"
    "    ada 50 stumps (SAMME); gb 100 stages, depth 3, lr 0.1; gb2 = gb with regularized\n"
    "    second-order gain (lambda 1), standing in for XGBoost/CatBoost\n"
    "  - descriptive std is the sample (n-1) std; quartiles interpolate linearly\n"
    "  - default Likert wording: hicbir zaman=0, neredeyse hicbir zaman=1, bazen=2,\n"
    "    oldukca sik=3, cok sik=4 (Turkish spelling; override with --mapping)\n"
    "Environment: every flag marked with an env name (PSS_*) can be set that way.\n";

struct CommonInput {
  std::string scale_path;
  std::string mapping_path;
  int item_offset = -1;
};

pss::ScaleDefinition load_scale_opt(const std::string& path) {
  return path.empty() ? pss::ScaleDefinition{} : pss::load_scale(path);
}

pss::LikertMapping load_mapping_opt(const std::string& path) {
  return path.empty() ? pss::LikertMapping::turkish_default() : pss::LikertMapping::load(path);
}

pss::ColumnLayout layout_from(const CommonInput& in) {
  pss::ColumnLayout layout;
  if (in.item_offset >= 0) layout.first_item_column = static_cast<std::size_t>(in.item_offset);
  return layout;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw pss::ValidationError("invalid seed \"" + item + "\"");
    }
  }
  return seeds;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void ensure_parent_writable(const std::filesystem::path& file) {
  const auto parent = file.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw pss::IoError("output directory " + parent.string() + " does not exist");
  }
}

int cmd_score(const CommonInput& in, const std::string& input, const std::string& out, const std::string& plots) {
  const auto scale = load_scale_opt(in.scale_path);
  const auto dataset = pss::parse_csv(input, scale, load_mapping_opt(in.mapping_path), layout_from(in));
  if (dataset.sheets.empty()) throw pss::ValidationError("empty dataset");
  const auto records = pss::score_dataset(scale, dataset.sheets);
  const auto stats = pss::describe(records);

  ensure_parent_writable(out);
  pss::write_csv_file(out, scale, dataset.sheets, records);
  if (!plots.empty()) {
    std::filesystem::create_directories(plots);
    pss::write_text_file(std::filesystem::path(plots) / "score_distribution.svg",
                         pss::score_distribution_svg(records, scale));
    pss::write_text_file(std::filesystem::path(plots) / "label_distribution.svg", pss::label_distribution_svg(stats));
  }
  std::cout << pss::format_summary(stats);
  if (stats.single_record) std::cerr << "warning: single record, std reported as 0\n";
  return 0;
}

int cmd_synth(const std::string& scale_path, const std::string& profile_path, const std::string& out,
              long long size, long long seed) {
  const auto scale = load_scale_opt(scale_path);
  auto profile = profile_path.empty() || profile_path == "default" ? pss::default_profile()
                                                                   : pss::load_profile(profile_path);
  if (size >= 0) profile.population_size = static_cast<std::size_t>(size);
  if (seed >= 0) profile.seed = static_cast<std::uint64_t>(seed);
  const auto dataset = pss::synth_generate(profile, scale);
  const auto records = pss::score_dataset(scale, dataset.sheets);
  ensure_parent_writable(out);
  pss::write_csv_file(out, scale, dataset.sheets, records);
  std::cout << "wrote " << dataset.size() << " synthetic respondents to " << out << "\n";
  return 0;
}

struct RunArgs {
  CommonInput in;
  std::string input, profile, manifest, models, seeds, emit, out, stratify;
  std::vector<std::string> overrides;
  double test_fraction = 0.2;
  bool save_models = false, serial = false;
  int threads = 0;
};

int cmd_run(const RunArgs& a) {
  pss::RunConfig config;
  if (!a.manifest.empty()) {
    config = pss::config_from_manifest(a.manifest);
  } else {
    config.scale = load_scale_opt(a.in.scale_path);
    if (!a.input.empty() && !a.profile.empty()) {
      throw CLI::ValidationError("--input and --profile", "give exactly one of --input and --profile");
    }
    if (a.input.empty() && a.profile.empty()) {
      throw CLI::ValidationError("--input/--profile", "one of --input or --profile (path or \"default\") is required");
    }
    if (!a.input.empty()) {
      config.input_path = a.input;
      config.mapping = load_mapping_opt(a.in.mapping_path);
      config.layout = layout_from(a.in);
    } else {
      config.profile = a.profile == "default" ? pss::default_profile() : pss::load_profile(a.profile);
    }
    for (const auto& id : split_list(a.models)) config.models.push_back(pss::default_spec(id));
    for (const auto& ov : a.overrides) {
      const auto dot = ov.find('.');
      const auto eq = ov.find('=');
      if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
        throw CLI::ValidationError("--set", "expected model.key=value, got \"" + ov + "\"");
      }
      const auto id = ov.substr(0, dot);
      bool found = false;
      for (auto& spec : config.models) {
        if (spec.id == id) {
          pss::apply_override(spec, ov.substr(dot + 1, eq - dot - 1), ov.substr(eq + 1));
          found = true;
        }
      }
      if (!found) throw CLI::ValidationError("--set", "model \"" + id + "\" is not in --models");
    }
    config.split.test_fraction = a.test_fraction;
    config.split.seeds = parse_seeds(a.seeds);
    const auto it = std::find(pss::kLabelNames.begin(), pss::kLabelNames.end(), a.stratify);
    if (it == pss::kLabelNames.end()) throw CLI::ValidationError("--stratify-on", "must be stres, faktor_1 or faktor_2");
    config.split.stratify_on = static_cast<std::size_t>(it - pss::kLabelNames.begin());
    config.emit = pss::parse_emit(a.emit);
    config.save_models = a.save_models;
  }
  config.out_dir = a.out;
  config.exec = a.serial ? pss::Exec::serial : pss::Exec::parallel;
  if (a.threads > 0) omp_set_num_threads(a.threads);

  const auto result = pss::execute_run(config);
  std::cout << "| Model | Precision | Recall | F1 |\n";
  for (const auto& agg : result.report.aggregates) {
    std::cout << "| " << agg.model_id << " | " << pss::format_mean_std(agg.precision) << " | "
              << pss::format_mean_std(agg.recall) << " | " << pss::format_mean_std(agg.f1) << " |\n";
  }
  std::size_t zero_div = 0;
  for (const auto& c : result.report.cells) zero_div += c.zero_division_events;
  if (zero_div > 0) std::cerr << "warning: " << zero_div << " metric computations hit 0/0 (counted as 0)\n";
  std::cout << "wrote " << result.files.size() << " files to " << config.out_dir.string() << "\n";
  return 0;
}

int cmd_rank(const std::string& report_path, std::size_t k) {
  std::filesystem::path path = report_path;
  if (std::filesystem::is_directory(path)) path /= "report.json";
  std::ifstream in(path);
  if (!in) throw pss::IoError("cannot open report " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw pss::ValidationError("report " + path.string() + ": " + e.what());
  }
  const auto report = pss::report_from_json(doc);
  const auto summary = pss::summarize_importance(report, k);
  const auto listing = pss::rank_questions(summary, k);
  auto print = [](const char* title, const std::vector<int>& ids, const std::vector<double>& values) {
    std::cout << title << ":";
    for (int q : ids) std::cout << ' ' << pss::question_id(q) << " (" << pss::csv::fixed(values[q - 1], 4) << ")";
    std::cout << '\n';
  };
  print("top", listing.top, summary.global_mean);
  print("bottom", listing.bottom, summary.global_mean);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceived-stress scale workbench: scoring, synthetic cohorts, tree-ensemble experiments"};
  app.footer(kAssumptions);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pss::kArtifactVersion));

  CommonInput common;
  auto add_scale = [&](CLI::App* sub) {
    sub->add_option("--scale", common.scale_path, "Scale definition JSON (default: built-in PSS-14)")
        ->envname("PSS_SCALE");
  };
  auto add_mapping = [&](CLI::App* sub) {
    sub->add_option("--mapping", common.mapping_path, "Likert text mapping JSON {\"text\": level} (default: Turkish)")
        ->envname("PSS_MAPPING");
    sub->add_option("--item-offset", common.item_offset,
                    "0-based column of the first answer; answers are the next N columns (default: match q1..qN "
                    "headers)");
  };

  std::string input, out, plots;
  auto* score = app.add_subcommand("score", "Score a response CSV and write the canonical scored CSV");
  add_scale(score);
  add_mapping(score);
  score->add_option("--input", input, "Response CSV (header row required)")->required()->envname("PSS_INPUT");
  score->add_option("--out", out, "Output CSV path")->required()->envname("PSS_OUT");
  score->add_option("--plots", plots, "Directory for score/label distribution SVGs");

  std::string profile_path;
  long long synth_size = -1, synth_seed = -1;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort as a canonical scored CSV");
  add_scale(synth);
  synth->add_option("--profile", profile_path, "Synth profile JSON, or \"default\" (150 rows, seed 20230504)")
      ->envname("PSS_PROFILE");
  synth->add_option("--out", synth_out, "Output CSV path")->required()->envname("PSS_OUT");
  synth->add_option("--size", synth_size, "Override population_size");
  synth->add_option("--seed", synth_seed, "Override seed");

  RunArgs run_args;
  run_args.models = "dt,rf,ada,gb,gb2";
  run_args.seeds = "0,1,2,3,4";
  run_args.emit = "csv,json,markdown,svg";
  run_args.out = "pss_out";
  run_args.stratify = "stres";
  auto* run = app.add_subcommand("run", "Run the repeated-split experiment and write the report bundle");
  add_scale(run);
  add_mapping(run);
  run->add_option("--input", run_args.input, "Response CSV")->envname("PSS_INPUT");
  run->add_option("--profile", run_args.profile, "Synth profile JSON, or \"default\"")->envname("PSS_PROFILE");
  run->add_option("--manifest", run_args.manifest, "Replay a previous run's manifest.json");
  run->add_option("--models", run_args.models, "Comma-separated model ids: dt, rf, ada, gb, gb2")
      ->capture_default_str()
      ->envname("PSS_MODELS");
  run->add_option("--set", run_args.overrides, "Hyperparameter override model.key=value (repeatable), e.g. rf.n_members=50");
  run->add_option("--seeds", run_args.seeds, "Comma-separated split seeds")->capture_default_str()->envname("PSS_SEEDS");
  run->add_option("--test-fraction", run_args.test_fraction, "Test share of each split")
      ->capture_default_str()
      ->envname("PSS_TEST_FRACTION");
  run->add_option("--stratify-on", run_args.stratify, "Label used to stratify splits")->capture_default_str();
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str()->envname("PSS_OUT");
  run->add_option("--emit", run_args.emit, "Output formats: csv, json, markdown, svg")
      ->capture_default_str()
      ->envname("PSS_EMIT");
  run->add_flag("--save-models", run_args.save_models, "Also refit each model on all rows and save it as JSON");
  run->add_flag("--serial", run_args.serial, "Use the serial reference path instead of OpenMP");
  run->add_option("--threads", run_args.threads, "OpenMP thread count (default: runtime choice)")
      ->envname("PSS_THREADS");

  std::string report_path = "pss_out";
  std::size_t k = 4;
  auto* rank = app.add_subcommand("rank", "Rank questions by mean importance from a run's report.json");
  rank->add_option("--report", report_path, "report.json or the run directory")->capture_default_str();
  rank->add_option("-k", k, "How many top/bottom questions to list")->capture_default_str()->check(CLI::Range(1, 14));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (score->parsed()) {
      run_args.in = common;
      return cmd_score(common, input, out, plots);
    }
    if (synth->parsed()) return cmd_synth(common.scale_path, profile_path, synth_out, synth_size, synth_seed);
    if (run->parsed()) {
      run_args.in = common;
      return cmd_run(run_args);
    }
    if (rank->parsed()) return cmd_rank(report_path, k);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pss::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const pss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
