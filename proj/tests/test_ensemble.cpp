#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include "pss/ensemble.hpp"
#include "pss/errors.hpp"
#include "pss/model_io.hpp"
#include "pss/synth.hpp"

using pss::EnsembleModel;
using pss::Exec;
using pss::FeatureMatrix;
using pss::HyperParams;

namespace {

const pss::ScaleDefinition kScale;

struct Fixture {
  FeatureMatrix x;
  pss::LabelMatrix y;
};

Fixture synthetic(std::size_t n = 150, std::uint64_t seed = 20230504) {
  auto p = pss::default_profile();
  p.population_size = n;
  p.seed = seed;
  const auto ds = pss::synth_generate(p, kScale);
  return {FeatureMatrix::from_sheets(ds.sheets, kScale),
          pss::LabelMatrix::from_records(pss::score_dataset(kScale, ds.sheets))};
}

FeatureMatrix random_matrix(pss::Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> v(n * 14);
  for (auto& c : v) c = static_cast<std::uint8_t>(rng.below(5));
  return FeatureMatrix(n, 14, 4, std::move(v));
}

FeatureMatrix matrix(const std::vector<std::vector<int>>& rows) {
  std::vector<std::uint8_t> v;
  for (const auto& r : rows) {
    for (int x : r) v.push_back(static_cast<std::uint8_t>(x));
  }
  return FeatureMatrix(rows.size(), rows[0].size(), 4, std::move(v));
}

void check_normalized(const std::vector<double>& imp) {
  double sum = 0;
  bool all_zero = true;
  for (double v : imp) {
    REQUIRE(v >= 0.0);
    sum += v;
    if (v != 0.0) all_zero = false;
  }
  if (!all_zero) REQUIRE(std::abs(sum - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("degenerate forest predicts like a single tree") {
  const auto f = synthetic();
  const auto y = f.y.column(0);
  HyperParams p;
  p.n_members = 1;
  const auto forest = pss::fit_forest(f.x, y, p);
  const auto tree = pss::fit_decision_tree(f.x, y, p);
  pss::Rng rng(41);
  const auto probe = random_matrix(rng, 1000);
  for (std::size_t i = 0; i < probe.rows(); ++i) REQUIRE(forest.predict(probe.row(i)) == tree.predict(probe.row(i)));
}

TEST_CASE("forest vote tie goes to class 0") {
  pss::Tree zero, one;
  zero.nodes.push_back({});
  zero.nodes[0].prediction = 0;
  one.nodes.push_back({});
  one.nodes[0].prediction = 1;
  one.nodes[0].value = 1.0;
  EnsembleModel m;
  m.kind = pss::ModelKind::forest;
  m.members = {zero, one};
  m.member_weights = {1.0, 1.0};
  const std::vector<std::uint8_t> x(14, 0);
  CHECK(m.predict(x) == 0);
}

TEST_CASE("forest is deterministic and the parallel path matches serial") {
  const auto f = synthetic();
  const auto y = f.y.column(1);
  auto spec = pss::default_spec("rf");
  spec.params.n_members = 30;
  const auto a = pss::fit_forest(f.x, y, spec.params, Exec::serial);
  const auto b = pss::fit_forest(f.x, y, spec.params, Exec::parallel);
  const auto c = pss::fit_forest(f.x, y, spec.params, Exec::parallel);
  CHECK(a == b);
  CHECK(b == c);
  CHECK(a.members.size() == 30);
  CHECK(a.predict(f.x, Exec::serial) == a.predict(f.x, Exec::parallel));
  spec.params.seed = 1;
  CHECK_FALSE(pss::fit_forest(f.x, y, spec.params) == a);
}

TEST_CASE("AdaBoost alpha") {
  CHECK(pss::adaboost_alpha(0.25) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(pss::adaboost_alpha(0.25) == doctest::Approx(1.0986).epsilon(1e-4));
  CHECK(pss::adaboost_alpha(0.5) == 0.0);
  CHECK(pss::adaboost_alpha(0.0) == pss::kMaxAdaBoostAlpha);
  CHECK(pss::adaboost_alpha(0.25, 0.5) == doctest::Approx(0.5 * std::log(3.0)));
}

TEST_CASE("AdaBoost on a separable pair stops after one perfect stump") {
  const auto x = matrix({{0}, {4}});
  const std::vector<std::uint8_t> y{0, 1};
  auto p = pss::default_spec("ada").params;
  pss::AdaBoostTrace trace;
  const auto m = pss::fit_adaboost(x, y, p, &trace);
  CHECK(m.members.size() == 1);
  CHECK(m.member_weights[0] == pss::kMaxAdaBoostAlpha);
  CHECK(m.predict(x.row(0)) == 0);
  CHECK(m.predict(x.row(1)) == 1);
}

TEST_CASE("AdaBoost sample weights stay positive and sum to one every round") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto f = synthetic(150, seed);
    for (std::size_t l = 0; l < 3; ++l) {
      pss::AdaBoostTrace trace;
      pss::fit_adaboost(f.x, f.y.column(l), pss::default_spec("ada").params, &trace);
      REQUIRE(!trace.weight_sums.empty());
      for (std::size_t r = 0; r < trace.weight_sums.size(); ++r) {
        REQUIRE(std::abs(trace.weight_sums[r] - 1.0) <= 1e-12);
        REQUIRE(trace.min_weights[r] > 0.0);
      }
    }
  }
}

TEST_CASE("AdaBoost on single-class labels is a single leaf") {
  const auto f = synthetic(40);
  const std::vector<std::uint8_t> y(40, 1);
  const auto m = pss::fit_adaboost(f.x, y, pss::default_spec("ada").params);
  CHECK(m.members.size() == 1);
  CHECK(m.members[0].nodes.size() == 1);
  CHECK(m.predict(f.x.row(0)) == 1);
}

TEST_CASE("gradient boosting prior") {
  const auto x = matrix({{0}, {1}, {2}, {3}});
  HyperParams p;
  p.n_members = 0;
  CHECK(pss::fit_gboost(x, std::vector<std::uint8_t>{0, 1, 0, 1}, p).init_raw == 0.0);
  const auto m = pss::fit_gboost(x, std::vector<std::uint8_t>{1, 1, 0, 1}, p);
  CHECK(m.init_raw == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  for (std::size_t i = 0; i < 4; ++i) CHECK(m.predict(x.row(i)) == 1);

  const auto single = pss::fit_gboost(x, std::vector<std::uint8_t>{0, 0, 0, 0}, pss::default_spec("gb").params);
  CHECK(single.members.empty());
  CHECK(single.predict(x.row(0)) == 0);
}

TEST_CASE("gradient boosting training deviance never increases") {
  const auto f = synthetic();
  for (const char* id : {"gb", "gb2"}) {
    for (std::size_t l = 0; l < 3; ++l) {
      pss::BoostTrace trace;
      pss::fit_gboost(f.x, f.y.column(l), pss::default_spec(id).params, &trace);
      REQUIRE(trace.deviance.size() == 101);
      for (std::size_t k = 1; k < trace.deviance.size(); ++k) {
        REQUIRE(trace.deviance[k] <= trace.deviance[k - 1] + 1e-9);
      }
    }
  }
}

TEST_CASE("identical label columns with a shared seed give identical models") {
  const auto f = synthetic();
  pss::LabelMatrix y(f.y.rows());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t l = 0; l < 3; ++l) y.set(r, l, f.y.at(r, 0));
  }
  auto spec = pss::default_spec("rf");
  spec.params.n_members = 10;
  const auto m = pss::fit_multioutput(spec, f.x, y, Exec::parallel, pss::SeedPolicy::shared);
  CHECK(m.per_label[0] == m.per_label[1]);
  CHECK(m.per_label[1] == m.per_label[2]);
  const auto pred = m.predict(f.x);
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    REQUIRE(pred.at(r, 0) == pred.at(r, 1));
    REQUIRE(pred.at(r, 1) == pred.at(r, 2));
  }
}

TEST_CASE("unlimited-depth trees reproduce duplicate-free training labels") {
  pss::Rng rng(42);
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<std::uint8_t> values;
  while (seen.size() < 120) {
    std::vector<std::uint8_t> r(14);
    for (auto& v : r) v = static_cast<std::uint8_t>(rng.below(5));
    if (seen.insert(r).second) values.insert(values.end(), r.begin(), r.end());
  }
  const FeatureMatrix x(120, 14, 4, values);
  pss::LabelMatrix y(120);
  for (std::size_t r = 0; r < 120; ++r) {
    for (std::size_t l = 0; l < 3; ++l) y.set(r, l, static_cast<std::uint8_t>(rng.below(2)));
  }
  const auto m = pss::fit_multioutput(pss::default_spec("dt"), x, y);
  CHECK(m.predict(x) == y);
}

TEST_CASE("importance of a single stump and of a leaf-only model") {
  std::vector<std::vector<int>> rows;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 12; ++i) {
    std::vector<int> r(14, 1);
    r[5] = i % 2 ? 4 : 0;
    rows.push_back(r);
    y.push_back(static_cast<std::uint8_t>(i % 2));
  }
  const auto x = matrix(rows);
  const auto m = pss::fit_decision_tree(x, y, HyperParams{});
  for (int f = 0; f < 14; ++f) CHECK(m.importance[f] == (f == 5 ? 1.0 : 0.0));

  const auto leaf = pss::fit_decision_tree(x, std::vector<std::uint8_t>(12, 0), HyperParams{});
  CHECK(leaf.importance == std::vector<double>(14, 0.0));
}

TEST_CASE("property: importance vectors are normalized for every model kind") {
  pss::Rng rng(43);
  const auto ids = pss::known_model_ids();
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 10 + rng.below(30);
    const auto x = random_matrix(rng, n);
    std::vector<std::uint8_t> y(n);
    const bool constant = rng.below(10) == 0;
    for (auto& v : y) v = constant ? 0 : static_cast<std::uint8_t>(rng.below(2));
    auto spec = pss::default_spec(ids[static_cast<std::size_t>(trial) % ids.size()]);
    spec.params.n_members = std::min(spec.params.n_members, 5);
    spec.params.seed = static_cast<std::uint64_t>(trial);
    check_normalized(pss::fit_model(spec, x, y, Exec::serial).importance);
  }
}

TEST_CASE("model specs and overrides") {
  const auto rf = pss::default_spec("rf");
  CHECK(rf.params.n_members == 100);
  CHECK(rf.params.bootstrap);
  CHECK(rf.params.feature_subsample == pss::FeatureSubsample::sqrt);
  const auto ada = pss::default_spec("ada");
  CHECK(ada.params.n_members == 50);
  CHECK(ada.params.max_depth == 1);
  const auto gb = pss::default_spec("gb");
  CHECK(gb.params.max_depth == 3);
  CHECK(gb.params.learning_rate == 0.1);
  CHECK_FALSE(gb.params.second_order_gain);
  CHECK(pss::default_spec("gb2").params.second_order_gain);
  CHECK_FALSE(pss::default_spec("dt").params.max_depth.has_value());

  auto s = rf;
  pss::apply_override(s, "n_members", "7");
  pss::apply_override(s, "max_depth", "none");
  pss::apply_override(s, "bootstrap", "false");
  CHECK(s.params.n_members == 7);
  CHECK_FALSE(s.params.bootstrap);
  CHECK_THROWS_AS(pss::apply_override(s, "n_members", "x"), pss::ValidationError);
  CHECK_THROWS_AS(pss::apply_override(s, "depth", "3"), pss::ValidationError);
  CHECK_THROWS_AS(pss::default_spec("svm"), pss::ValidationError);
}

TEST_CASE("model JSON round trip reproduces predictions exactly") {
  const auto f = synthetic();
  for (const auto& id : pss::known_model_ids()) {
    auto spec = pss::default_spec(id);
    spec.params.n_members = std::min(spec.params.n_members, 10);
    const auto m = pss::fit_multioutput(spec, f.x, f.y);
    const auto back = pss::multioutput_from_json(pss::to_json(m));
    CHECK(back == m);
  }
  const auto path = std::filesystem::temp_directory_path() / "pss_model_roundtrip.json";
  const auto m = pss::fit_multioutput(pss::default_spec("gb2"), f.x, f.y);
  pss::save_model(path, m);
  CHECK(pss::load_model(path) == m);
  std::filesystem::remove(path);
}
