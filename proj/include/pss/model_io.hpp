#pragma once

#include <filesystem>

#include <json.hpp>

#include "pss/ensemble.hpp"

namespace pss {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const HyperParams& params);
HyperParams hyperparams_from_json(const nlohmann::json& doc);

// Nodes are written recursively: internal nodes carry feature, threshold,
// gain, weight_fraction, left and right; leaves carry class_weights,
// prediction and value.
nlohmann::json to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const MultiOutputModel& model);
MultiOutputModel multioutput_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const MultiOutputModel& model);
MultiOutputModel load_model(const std::filesystem::path& path);

}  // namespace pss
