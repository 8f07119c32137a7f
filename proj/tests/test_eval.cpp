#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pss/errors.hpp"
#include "pss/eval.hpp"
#include "pss/synth.hpp"

using pss::ConfusionMatrix;

namespace {

std::vector<std::uint8_t> labels_76_74() {
  std::vector<std::uint8_t> y(150, 0);
  std::fill(y.begin() + 76, y.end(), 1);
  return y;
}

std::vector<std::uint8_t> u8(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("stratified split sizes") {
  const auto y = labels_76_74();
  const auto s = pss::stratified_split(y, 0, 0.2);
  CHECK(s.train.size() == 120);
  CHECK(s.test.size() == 30);
  std::size_t test_ones = 0;
  for (auto i : s.test) test_ones += y[i];
  CHECK(test_ones == 15);

  const auto again = pss::stratified_split(y, 0, 0.2);
  CHECK(again.test == s.test);
  CHECK(pss::stratified_split(y, 1, 0.2).test != s.test);
}

TEST_CASE("split errors") {
  std::vector<std::uint8_t> y(20, 0);
  y[3] = 1;
  CHECK_THROWS_AS(pss::stratified_split(y, 0, 0.2), pss::ValidationError);
  CHECK_THROWS_AS(pss::stratified_split(std::vector<std::uint8_t>(5, 0), 0, 0.2), pss::ValidationError);
  pss::SplitSpec spec;
  spec.test_fraction = 1.0;
  CHECK_THROWS_AS(spec.validate(), pss::ValidationError);
  spec = {};
  spec.seeds = {1, 1};
  CHECK_THROWS_AS(spec.validate(), pss::ValidationError);
  spec.seeds = {};
  CHECK_THROWS_AS(spec.validate(), pss::ValidationError);
}

TEST_CASE("property: splits are disjoint, covering and stratified") {
  pss::Rng rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 10 + rng.below(300);
    std::vector<std::uint8_t> y(n);
    const double p = 0.2 + 0.6 * rng.uniform();
    for (auto& v : y) v = rng.uniform() < p;
    const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (ones < 2 || n - ones < 2) continue;
    const double tf = 0.1 + 0.8 * rng.uniform();
    const auto s = pss::stratified_split(y, rng.next(), tf);

    std::vector<int> seen(n, 0);
    for (auto i : s.train) seen[i] += 1;
    for (auto i : s.test) seen[i] += 1;
    REQUIRE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    REQUIRE(std::is_sorted(s.train.begin(), s.train.end()));
    REQUIRE(std::is_sorted(s.test.begin(), s.test.end()));
    REQUIRE(s.test.size() == static_cast<std::size_t>(std::lround(tf * static_cast<double>(n))));

    std::size_t test_ones = 0;
    for (auto i : s.test) test_ones += y[i];
    const double expected = static_cast<double>(ones) * static_cast<double>(s.test.size()) / static_cast<double>(n);
    REQUIRE(std::abs(static_cast<double>(test_ones) - expected) <= 1.0 + 1e-9);
  }
}

TEST_CASE("confusion counts") {
  CHECK(pss::confusion(u8({1, 0, 1}), u8({1, 1, 0})) == ConfusionMatrix{1, 1, 1, 0});
  CHECK(pss::confusion(u8({0, 1, 1, 0}), u8({0, 1, 1, 0})) == ConfusionMatrix{2, 0, 0, 2});
  CHECK(pss::confusion(u8({0, 0, 0}), u8({0, 0, 0})) == ConfusionMatrix{0, 0, 0, 3});
  CHECK_THROWS_AS(pss::confusion(u8({0, 1}), u8({0})), pss::ValidationError);
}

TEST_CASE("macro metrics on the hand-computed case") {
  const auto m = pss::macro_metrics(pss::confusion(u8({0, 0, 1, 1}), u8({0, 1, 1, 1})));
  CHECK(m.precision == doctest::Approx((1.0 + 2.0 / 3.0) / 2).epsilon(1e-15));
  CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2).epsilon(1e-15));
}

TEST_CASE("zero division counts as zero and is flagged") {
  bool flagged = false;
  const auto m = pss::macro_metrics(ConfusionMatrix{0, 0, 0, 4}, &flagged);
  CHECK(flagged);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == 0.5);
  flagged = false;
  pss::macro_metrics(ConfusionMatrix{1, 1, 1, 1}, &flagged);
  CHECK_FALSE(flagged);
}

TEST_CASE("macro metrics match the exhaustive oracle on all length-6 pairs") {
  for (int t = 0; t < 64; ++t) {
    for (int p = 0; p < 64; ++p) {
      std::vector<int> yt(6), yp(6);
      for (int i = 0; i < 6; ++i) {
        yt[i] = (t >> i) & 1;
        yp[i] = (p >> i) & 1;
      }
      const auto got = pss::macro_metrics(pss::confusion(u8(yt), u8(yp)));
      const auto want = oracle::macro_from_labels(yt, yp);
      REQUIRE(std::abs(got.precision - want.precision) <= 1e-12);
      REQUIRE(std::abs(got.recall - want.recall) <= 1e-12);
      REQUIRE(std::abs(got.f1 - want.f1) <= 1e-12);
    }
  }
}

TEST_CASE("property: metrics are bounded, class-symmetric and perfect on exact predictions") {
  pss::Rng rng(52);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<std::uint8_t> yt(n), yp(n), ft(n), fp(n);
    for (std::size_t i = 0; i < n; ++i) {
      yt[i] = static_cast<std::uint8_t>(rng.below(2));
      yp[i] = static_cast<std::uint8_t>(rng.below(2));
      ft[i] = 1 - yt[i];
      fp[i] = 1 - yp[i];
    }
    const auto a = pss::macro_metrics(pss::confusion(yt, yp));
    const auto b = pss::macro_metrics(pss::confusion(ft, fp));
    for (double v : {a.precision, a.recall, a.f1}) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
    REQUIRE(std::abs(a.precision - b.precision) <= 1e-15);
    REQUIRE(std::abs(a.recall - b.recall) <= 1e-15);
    REQUIRE(std::abs(a.f1 - b.f1) <= 1e-15);

    const bool both_classes = std::count(yt.begin(), yt.end(), 1) > 0 && std::count(yt.begin(), yt.end(), 0) > 0;
    if (both_classes) {
      const auto perfect = pss::macro_metrics(pss::confusion(yt, yt));
      REQUIRE(perfect.precision == 1.0);
      REQUIRE(perfect.recall == 1.0);
      REQUIRE(perfect.f1 == 1.0);
    }
  }
}

TEST_CASE("label averaging") {
  const std::array<pss::MetricTriple, 3> same{{{0.9, 0.9, 0.9}, {0.9, 0.9, 0.9}, {0.9, 0.9, 0.9}}};
  const auto a = pss::multilabel_macro(same);
  CHECK(a.precision == doctest::Approx(0.9));
  CHECK(a.f1 == doctest::Approx(0.9));
  const std::array<pss::MetricTriple, 3> spread{{{1.0, 1, 1}, {0.5, 1, 1}, {0.0, 1, 1}}};
  CHECK(pss::multilabel_macro(spread).precision == doctest::Approx(0.5));
  CHECK(pss::multilabel_macro(spread).recall == 1.0);
}

TEST_CASE("mean and sample std") {
  const std::vector<double> v{0.9, 0.95, 0.85};
  const auto ms = pss::mean_std(v);
  CHECK(ms.mean == doctest::Approx(0.9));
  CHECK(ms.std == doctest::Approx(oracle::sample_std(v)).epsilon(1e-14));
  CHECK(pss::mean_std(std::vector<double>{0.5}).std == 0.0);
}

TEST_CASE("experiment grid counts, determinism and aggregation") {
  auto profile = pss::default_profile();
  const pss::ScaleDefinition scale;
  const auto ds = pss::synth_generate(profile, scale);
  const auto x = pss::FeatureMatrix::from_sheets(ds.sheets, scale);
  const auto y = pss::LabelMatrix::from_records(pss::score_dataset(scale, ds.sheets));

  std::vector<pss::ModelSpec> models;
  for (const auto& id : pss::known_model_ids()) {
    auto spec = pss::default_spec(id);
    spec.params.n_members = std::min(spec.params.n_members, 10);
    models.push_back(spec);
  }
  pss::SplitSpec split;
  const auto serial = pss::run_experiment(x, y, models, split, pss::Exec::serial);
  const auto parallel = pss::run_experiment(x, y, models, split, pss::Exec::parallel);
  REQUIRE(serial.cells.size() == models.size() * 5);

  std::size_t matrices = 0;
  for (std::size_t c = 0; c < serial.cells.size(); ++c) {
    const auto& a = serial.cells[c];
    const auto& b = parallel.cells[c];
    CHECK(a.model_id == models[c / 5].id);
    CHECK(a.seed == split.seeds[c % 5]);
    CHECK(a.test_size == 30);
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(a.confusion[l] == b.confusion[l]);
      CHECK(a.confusion[l].total() == 30);
      ++matrices;
    }
    CHECK(a.averaged.f1 == b.averaged.f1);
    CHECK(a.importance == b.importance);
  }
  CHECK(matrices == models.size() * 15);

  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<double> f1, precision;
    for (std::size_t s = 0; s < 5; ++s) {
      f1.push_back(serial.cell(m, s).averaged.f1);
      precision.push_back(serial.cell(m, s).averaged.precision);
    }
    double mean = 0;
    for (double v : f1) mean += v;
    mean /= 5;
    CHECK(std::abs(serial.aggregates[m].f1.mean - mean) <= 1e-12);
    CHECK(std::abs(serial.aggregates[m].f1.std - oracle::sample_std(f1)) <= 1e-12);
    CHECK(std::abs(serial.aggregates[m].precision.std - oracle::sample_std(precision)) <= 1e-12);
  }
}

TEST_CASE("labels that are an exact function of one question are learned perfectly") {
  pss::Rng rng(53);
  const std::size_t n = 200;
  std::vector<std::uint8_t> values(n * 14);
  for (auto& v : values) v = static_cast<std::uint8_t>(rng.below(5));
  const pss::FeatureMatrix x(n, 14, 4, values);
  pss::LabelMatrix y(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto q3 = x.at(r, 2);
    y.set(r, 0, q3 >= 2);
    y.set(r, 1, q3 >= 3);
    y.set(r, 2, q3 >= 1);
  }
  const auto report = pss::run_experiment(x, y, {pss::default_spec("dt")}, pss::SplitSpec{});
  CHECK(report.aggregates[0].f1.mean == 1.0);
  CHECK(report.aggregates[0].f1.std == 0.0);
}

TEST_CASE("experiment errors name the model and seed") {
  const std::size_t n = 20;
  std::vector<std::uint8_t> values(n * 14, 1);
  const pss::FeatureMatrix x(n, 14, 4, values);
  pss::LabelMatrix y(n);
  y.set(0, 0, 1);
  try {
    pss::run_experiment(x, y, {pss::default_spec("dt")}, pss::SplitSpec{});
    FAIL("expected a ValidationError");
  } catch (const pss::ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model dt") != std::string::npos);
    CHECK(msg.find("seed 0") != std::string::npos);
  }
}
