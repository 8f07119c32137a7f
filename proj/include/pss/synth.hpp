#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "pss/ingest.hpp"
#include "pss/scale.hpp"

namespace pss {

/// Single-latent-trait respondent model. For respondent j a trait
/// t ~ Normal(latent_mean, latent_std) is drawn once; item i's oriented score
/// is round(mid + offset_i + loading_i * t + Normal(0, noise_std)) clamped to
/// [0, max], where mid = max / 2. Reverse-scored items store the mirrored raw
/// answer, i.e. they see a negated loading, so a higher trait always means a
/// higher total score.
struct SynthProfile {
  std::size_t population_size = 150;
  double latent_mean = 0.0;
  double latent_std = 1.0;
  std::vector<double> item_loadings;  // one per item
  std::vector<double> item_offsets;   // one per item; empty means all zero
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  void validate(const ScaleDefinition& scale) const;
};

// Calibrated against a reference cohort: total mean 27.72 and
// std 9.65, with factor means near 12.1 and 15.6.
SynthProfile default_profile();

SynthProfile profile_from_json(const nlohmann::json& doc);
SynthProfile load_profile(const std::filesystem::path& path);
nlohmann::json to_json(const SynthProfile& profile);

Dataset synth_generate(const SynthProfile& profile, const ScaleDefinition& scale);

/// Dataset whose labels depend only on `signal_items`: answers are uniform and
/// independent, stress = 1 iff the signal items' scored sum exceeds its
/// midpoint, and each factor label uses the signal items belonging to that
/// factor (all signal items when none do).
struct PlantedData {
  std::vector<ResponseSheet> sheets;
  std::vector<LabelTriple> labels;
};

PlantedData planted_signal(std::size_t n, const std::vector<int>& signal_items, const ScaleDefinition& scale,
                           std::uint64_t seed);

}  // namespace pss
