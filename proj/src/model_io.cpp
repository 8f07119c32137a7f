#include "pss/model_io.hpp"

#include <fstream>

#include "pss/errors.hpp"

namespace pss {

nlohmann::json to_json(const HyperParams& p) {
  return nlohmann::json{
      {"max_depth", p.max_depth ? nlohmann::json(*p.max_depth) : nlohmann::json(nullptr)},
      {"min_samples_split", p.min_samples_split},
      {"n_members", p.n_members},
      {"feature_subsample", p.feature_subsample == FeatureSubsample::sqrt ? "sqrt" : "all"},
      {"learning_rate", p.learning_rate},
      {"bootstrap", p.bootstrap},
      {"second_order_gain", p.second_order_gain},
      {"l2_regularization", p.l2_regularization},
      {"seed", p.seed},
  };
}

HyperParams hyperparams_from_json(const nlohmann::json& doc) {
  HyperParams p;
  const auto& depth = doc.at("max_depth");
  if (!depth.is_null()) p.max_depth = depth.get<int>();
  p.min_samples_split = doc.at("min_samples_split").get<int>();
  p.n_members = doc.at("n_members").get<int>();
  p.feature_subsample = doc.at("feature_subsample").get<std::string>() == "sqrt" ? FeatureSubsample::sqrt
                                                                                  : FeatureSubsample::all;
  p.learning_rate = doc.at("learning_rate").get<double>();
  p.bootstrap = doc.at("bootstrap").get<bool>();
  p.second_order_gain = doc.at("second_order_gain").get<bool>();
  p.l2_regularization = doc.at("l2_regularization").get<double>();
  p.seed = doc.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

namespace {

nlohmann::json node_to_json(const Tree& tree, int id) {
  const auto& n = tree.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) {
    return nlohmann::json{{"class_weights", n.class_weights},
                          {"weight_fraction", n.weight_fraction},
                          {"prediction", n.prediction},
                          {"value", n.value}};
  }
  return nlohmann::json{
      {"feature", n.feature},
      {"threshold", n.threshold},
      {"gain", n.gain},
      {"weight_fraction", n.weight_fraction},
      {"class_weights", n.class_weights},
      {"left", node_to_json(tree, n.left)},
      {"right", node_to_json(tree, n.right)},
  };
}

// Rebuilds nodes in the same preorder the grower uses, so a round trip
// reproduces the flat array exactly.
int node_from_json(const nlohmann::json& doc, Tree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  node.class_weights = doc.at("class_weights").get<std::array<double, 2>>();
  node.weight_fraction = doc.at("weight_fraction").get<double>();
  if (doc.contains("feature")) {
    node.feature = doc.at("feature").get<int>();
    node.threshold = doc.at("threshold").get<double>();
    node.gain = doc.at("gain").get<double>();
    node.left = node_from_json(doc.at("left"), tree);
    node.right = node_from_json(doc.at("right"), tree);
  } else {
    node.prediction = doc.at("prediction").get<int>();
    node.value = doc.at("value").get<double>();
  }
  tree.nodes[static_cast<std::size_t>(id)] = node;
  return id;
}

}  // namespace

nlohmann::json to_json(const Tree& tree) { return node_to_json(tree, 0); }

Tree tree_from_json(const nlohmann::json& doc) {
  Tree tree;
  node_from_json(doc, tree);
  return tree;
}

nlohmann::json to_json(const EnsembleModel& model) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& t : model.members) members.push_back(to_json(t));
  return nlohmann::json{
      {"format_version", kModelFormatVersion},
      {"kind", std::string(to_string(model.kind))},
      {"hyperparams", to_json(model.params)},
      {"learning_rate", model.learning_rate},
      {"init_raw", model.init_raw},
      {"member_weights", model.member_weights},
      {"members", std::move(members)},
      {"importance", model.importance},
  };
}

EnsembleModel ensemble_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model format_version " + doc.at("format_version").dump());
    }
    EnsembleModel m;
    m.kind = model_kind_from_string(doc.at("kind").get<std::string>());
    m.params = hyperparams_from_json(doc.at("hyperparams"));
    m.learning_rate = doc.at("learning_rate").get<double>();
    m.init_raw = doc.at("init_raw").get<double>();
    m.member_weights = doc.at("member_weights").get<std::vector<double>>();
    for (const auto& t : doc.at("members")) m.members.push_back(tree_from_json(t));
    m.importance = doc.at("importance").get<std::vector<double>>();
    if (m.members.size() != m.member_weights.size()) throw ValidationError("member and weight counts differ");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model document: ") + e.what());
  }
}

nlohmann::json to_json(const ModelSpec& spec) {
  return nlohmann::json{{"id", spec.id}, {"kind", std::string(to_string(spec.kind))}, {"hyperparams", to_json(spec.params)}};
}

ModelSpec model_spec_from_json(const nlohmann::json& doc) {
  try {
    ModelSpec spec;
    spec.id = doc.at("id").get<std::string>();
    spec.kind = model_kind_from_string(doc.at("kind").get<std::string>());
    spec.params = hyperparams_from_json(doc.at("hyperparams"));
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model spec: ") + e.what());
  }
}

nlohmann::json to_json(const MultiOutputModel& model) {
  nlohmann::json labels = nlohmann::json::object();
  for (std::size_t l = 0; l < kLabelCount; ++l) labels[kLabelNames[l]] = to_json(model.per_label[l]);
  return nlohmann::json{{"format_version", kModelFormatVersion}, {"labels", std::move(labels)}};
}

MultiOutputModel multioutput_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model format_version");
    }
    MultiOutputModel m;
    for (std::size_t l = 0; l < kLabelCount; ++l) m.per_label[l] = ensemble_from_json(doc.at("labels").at(kLabelNames[l]));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const MultiOutputModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(model).dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

MultiOutputModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return multioutput_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file " + path.string() + ": " + e.what());
  }
}

}  // namespace pss
