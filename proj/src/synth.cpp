#include "pss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pss/errors.hpp"
#include "pss/rng.hpp"

namespace pss {

void SynthProfile::validate(const ScaleDefinition& scale) const {
  if (static_cast<int>(item_loadings.size()) != scale.item_count) {
    throw ValidationError("profile has " + std::to_string(item_loadings.size()) + " item loadings, scale has " +
                          std::to_string(scale.item_count) + " items");
  }
  if (!item_offsets.empty() && item_offsets.size() != item_loadings.size()) {
    throw ValidationError("item_offsets must be empty or have one entry per item");
  }
  if (!(latent_std >= 0.0)) throw ValidationError("latent_std must be non-negative");
  if (!(noise_std >= 0.0)) throw ValidationError("noise_std must be non-negative");
}

SynthProfile default_profile() {
  SynthProfile p;
  p.population_size = 150;
  p.latent_mean = 0.0;
  p.latent_std = 0.66;
  p.item_loadings.assign(14, 1.0);
  // Factor I items (4,5,6,8,9,10,13) sit lower and Factor II items higher.
  p.item_offsets = {0.26, 0.26, 0.26, -0.23, -0.23, -0.23, 0.26, -0.23, -0.23, -0.23, 0.26, 0.26, -0.23, 0.26};
  p.noise_std = 0.75;
  p.seed = 20230504;
  return p;
}

SynthProfile profile_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("synth profile must be a JSON object");
  SynthProfile p = default_profile();
  try {
    if (doc.contains("population_size")) {
      const auto n = doc.at("population_size").get<long long>();
      if (n < 0) throw ValidationError("population_size must be non-negative");
      p.population_size = static_cast<std::size_t>(n);
    }
    if (doc.contains("latent_mean")) p.latent_mean = doc.at("latent_mean").get<double>();
    if (doc.contains("latent_std")) p.latent_std = doc.at("latent_std").get<double>();
    if (doc.contains("item_loadings")) p.item_loadings = doc.at("item_loadings").get<std::vector<double>>();
    if (doc.contains("item_offsets")) p.item_offsets = doc.at("item_offsets").get<std::vector<double>>();
    if (doc.contains("noise_std")) p.noise_std = doc.at("noise_std").get<double>();
    if (doc.contains("seed")) p.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth profile: ") + e.what());
  }
  return p;
}

SynthProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile " + path.string());
  try {
    return profile_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("profile " + path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const SynthProfile& p) {
  return nlohmann::json{
      {"population_size", p.population_size}, {"latent_mean", p.latent_mean},
      {"latent_std", p.latent_std},           {"item_loadings", p.item_loadings},
      {"item_offsets", p.item_offsets},       {"noise_std", p.noise_std},
      {"seed", p.seed},
  };
}

Dataset synth_generate(const SynthProfile& profile, const ScaleDefinition& scale) {
  profile.validate(scale);
  Rng rng(profile.seed);
  const double mid = scale.max_item_value / 2.0;
  const auto items = static_cast<std::size_t>(scale.item_count);

  Dataset ds;
  ds.source_name = "synthetic(seed=" + std::to_string(profile.seed) + ")";
  ds.sheets.reserve(profile.population_size);
  for (std::size_t j = 0; j < profile.population_size; ++j) {
    const double trait = rng.normal(profile.latent_mean, profile.latent_std);
    ResponseSheet sheet;
    sheet.answers.resize(items);
    for (std::size_t i = 0; i < items; ++i) {
      const double offset = profile.item_offsets.empty() ? 0.0 : profile.item_offsets[i];
      const double noise = profile.noise_std > 0 ? rng.normal(0.0, profile.noise_std) : 0.0;
      const double oriented = mid + offset + profile.item_loadings[i] * trait + noise;
      const int level = std::clamp(static_cast<int>(std::lround(oriented)), 0, scale.max_item_value);
      sheet.answers[i] = scale.is_reversed(static_cast<int>(i) + 1) ? scale.max_item_value - level : level;
    }
    ds.sheets.push_back(std::move(sheet));
    ds.row_provenance.push_back(j + 2);
  }
  return ds;
}

PlantedData planted_signal(std::size_t n, const std::vector<int>& signal_items, const ScaleDefinition& scale,
                           std::uint64_t seed) {
  if (signal_items.empty()) throw ValidationError("planted signal needs at least one item");
  for (int q : signal_items) {
    if (q < 1 || q > scale.item_count) throw ValidationError("signal item " + std::to_string(q) + " out of range");
  }
  auto members_of = [&](Factor f) {
    std::vector<int> out;
    for (int q : signal_items) {
      const auto& items = scale.factor_items(f);
      if (std::find(items.begin(), items.end(), q) != items.end()) out.push_back(q);
    }
    return out.empty() ? signal_items : out;
  };
  const auto f1_items = members_of(Factor::one);
  const auto f2_items = members_of(Factor::two);
  const auto levels = static_cast<std::uint64_t>(scale.max_item_value) + 1;

  auto exceeds_mid = [&](const ResponseSheet& s, const std::vector<int>& items) {
    int sum = 0;
    for (int q : items) sum += item_score(scale, q, s.answers[q - 1]);
    return static_cast<std::uint8_t>(2 * sum > scale.max_item_value * static_cast<int>(items.size()));
  };

  Rng rng(seed);
  PlantedData out;
  out.sheets.reserve(n);
  out.labels.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    ResponseSheet s;
    s.answers.resize(static_cast<std::size_t>(scale.item_count));
    for (auto& a : s.answers) a = static_cast<int>(rng.below(levels));
    out.labels.push_back({exceeds_mid(s, signal_items), exceeds_mid(s, f1_items), exceeds_mid(s, f2_items)});
    out.sheets.push_back(std::move(s));
  }
  return out;
}

}  // namespace pss
