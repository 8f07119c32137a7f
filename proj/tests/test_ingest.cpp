#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pss/csv.hpp"
#include "pss/errors.hpp"
#include "pss/ingest.hpp"
#include "pss/rng.hpp"

namespace {

const pss::ScaleDefinition kScale;

std::string header() {
  std::string h;
  for (int q = 1; q <= 14; ++q) h += (q > 1 ? ",q" : "q") + std::to_string(q);
  return h + "\n";
}

std::string expect_error(const std::string& text) {
  try {
    pss::parse_csv_text(text, "inline", kScale);
  } catch (const pss::ValidationError& e) {
    return e.what();
  }
  return "(no error)";
}

pss::ScoredRecord with_total(int total) {
  pss::ScoredRecord r;
  r.total_score = total;
  return r;
}

}  // namespace

TEST_CASE("csv parser handles quotes, CRLF, BOM and blank lines") {
  const auto rows = pss::csv::parse("\xEF\xBB\xBF" "a,\"b,c\",\"d \"\"e\"\"\"\r\n\r\n1,2,3\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d \"e\""});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
  CHECK(pss::csv::quote("x,y") == "\"x,y\"");
  CHECK(pss::csv::quote("plain") == "plain");
}

TEST_CASE("number formatting is locale independent") {
  CHECK(pss::csv::fixed(92.525, 2) == "92.53");
  CHECK(pss::csv::fixed(-0.001, 2) == "0.00");
  CHECK(pss::csv::fixed(3.0, 0) == "3");
  CHECK(pss::csv::shortest(0.1) == "0.1");
}

TEST_CASE("one all-zero row parses to one all-zero sheet") {
  const auto ds = pss::parse_csv_text(header() + "0,0,0,0,0,0,0,0,0,0,0,0,0,0\n", "inline", kScale);
  REQUIRE(ds.size() == 1);
  CHECK(ds.sheets[0].answers == std::vector<int>(14, 0));
  CHECK(ds.row_provenance == std::vector<std::size_t>{2});
}

TEST_CASE("out-of-range numeric cell names row and column") {
  CHECK(expect_error(header() + "0,0,5,0,0,0,0,0,0,0,0,0,0,0\n") == "value out of range [0,4] at row 2, column q3");
}

TEST_CASE("row length and content errors") {
  CHECK(expect_error(header() + "0,0,0\n").find("row 2: expected 14 columns, got 3") != std::string::npos);
  CHECK(expect_error(header() + "0,0,0,0,0,0,0,0,0,0,0,0,0,sometimes\n") ==
        "unknown answer text \"sometimes\" at row 2, column q14");
  CHECK(expect_error(header() + "0,0,0,0,0,0,0,0,0,0,0,0,0,\n") == "missing answer at row 2, column q14");
  CHECK(expect_error("") == "empty dataset");
  CHECK(expect_error("a,b\n1,2\n").find("missing column q1") != std::string::npos);
}

TEST_CASE("header-only file yields an empty dataset") {
  CHECK(pss::parse_csv_text(header(), "inline", kScale).size() == 0);
}

TEST_CASE("Turkish Likert wording maps to levels, case and space insensitive") {
  const auto m = pss::LikertMapping::turkish_default();
  CHECK(m.lookup("hiçbir zaman") == 0);
  CHECK(m.lookup("  Neredeyse hiçbir zaman ") == 1);
  CHECK(m.lookup("BAZEN") == 2);
  CHECK(m.lookup("Oldukça sık") == 3);
  CHECK(m.lookup("ÇOK SIK") == 4);
  CHECK_FALSE(m.lookup("often").has_value());

  std::string row = "Hiçbir zaman";
  for (int i = 1; i < 14; ++i) row += ",bazen";
  const auto ds = pss::parse_csv_text(header() + row + "\n", "inline", kScale);
  CHECK(ds.sheets[0].answers[0] == 0);
  CHECK(ds.sheets[0].answers[13] == 2);
}

TEST_CASE("custom mapping and positional layout for form exports") {
  const auto m = pss::LikertMapping::from_json({{"never", 0}, {"sometimes", 2}, {"always", 4}});
  pss::ColumnLayout layout;
  layout.first_item_column = 1;
  std::string text = "Timestamp";
  for (int q = 1; q <= 14; ++q) text += ",\"Question " + std::to_string(q) + ", in words\"";
  text += "\n2024-01-01 10:00";
  for (int q = 1; q <= 14; ++q) text += q % 2 ? ",never" : ",Always";
  const auto ds = pss::parse_csv_text(text + "\n", "form", kScale, m, layout);
  REQUIRE(ds.size() == 1);
  CHECK(ds.sheets[0].answers[0] == 0);
  CHECK(ds.sheets[0].answers[1] == 4);

  CHECK_THROWS_AS(pss::LikertMapping::from_json({{"x", -1}}), pss::ValidationError);
  CHECK_THROWS_AS(pss::LikertMapping::from_json({{"x", 1}, {"X", 2}}), pss::ValidationError);
}

TEST_CASE("property: parse_csv inverts write_csv") {
  pss::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<pss::ResponseSheet> sheets(1 + rng.below(30));
    for (auto& s : sheets) {
      s.answers.resize(14);
      for (auto& v : s.answers) v = static_cast<int>(rng.below(5));
    }
    const auto records = pss::score_dataset(kScale, sheets);
    std::ostringstream out;
    pss::write_csv(out, kScale, sheets, records);
    const auto back = pss::parse_csv_text(out.str(), "roundtrip", kScale);
    REQUIRE(back.sheets == sheets);
  }
}

TEST_CASE("canonical CSV row carries scores and labels") {
  const std::vector<pss::ResponseSheet> sheets{{std::vector<int>(14, 0)}};
  const auto records = pss::score_dataset(kScale, sheets);
  std::ostringstream out;
  pss::write_csv(out, kScale, sheets, records);
  const auto text = out.str();
  CHECK(text.rfind("q1,q2,", 0) == 0);
  CHECK(text.find("q14,skor,faktor_1_skor,faktor_2_skor,stres,faktor_1,faktor_2") != std::string::npos);
  CHECK(text.find("0,0,28,24,4,0,1,0") != std::string::npos);
}

TEST_CASE("describe: mean and sample std") {
  const std::vector<pss::ScoredRecord> two{with_total(20), with_total(36)};
  const auto s = pss::describe(two);
  CHECK(s.total.mean == doctest::Approx(28.0));
  CHECK(s.total.std == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.total.std == doctest::Approx(11.3137).epsilon(1e-5));
}

TEST_CASE("describe: quartiles interpolate linearly") {
  std::vector<pss::ScoredRecord> five;
  for (int t : {35, 4, 52, 20, 27}) five.push_back(with_total(t));
  const auto s = pss::describe(five);
  CHECK(s.total.p25 == 20);
  CHECK(s.total.p50 == 27);
  CHECK(s.total.p75 == 35);
  CHECK(s.total.min == 4);
  CHECK(s.total.max == 52);

  const std::vector<double> v{1, 2, 3, 4};
  CHECK(pss::quantile_sorted(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("describe: single record and empty input") {
  const std::vector<pss::ScoredRecord> one{with_total(30)};
  const auto s = pss::describe(one);
  CHECK(s.single_record);
  CHECK(s.total.std == 0);
  CHECK(s.total.min == s.total.max);
  CHECK(s.total.mean == 30);
  CHECK_THROWS_WITH_AS(pss::describe({}), "empty dataset", pss::ValidationError);
}

TEST_CASE("property: describe means are additive") {
  pss::Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<pss::ResponseSheet> sheets(1 + rng.below(200));
    for (auto& s : sheets) {
      s.answers.resize(14);
      for (auto& v : s.answers) v = static_cast<int>(rng.below(5));
    }
    const auto st = pss::describe(pss::score_dataset(kScale, sheets));
    REQUIRE(std::abs(st.total.mean - st.factor1.mean - st.factor2.mean) <= 1e-9);
  }
}

TEST_CASE("summary layout has count/mean/std/quartile rows and label counts") {
  std::vector<pss::ResponseSheet> sheets{{std::vector<int>(14, 0)}, {std::vector<int>(14, 4)}};
  const auto text = pss::format_summary(pss::describe(pss::score_dataset(kScale, sheets)));
  for (const char* row : {"count", "mean", "std", "min", "25%", "50%", "75%", "max", "stres", "faktor_1"}) {
    CHECK(text.find(row) != std::string::npos);
  }
}

TEST_CASE("validate_dataset findings") {
  pss::Dataset ok;
  ok.sheets.assign(3, {std::vector<int>(14, 1)});
  CHECK(pss::validate_dataset(ok, kScale).empty());

  pss::Dataset bad;
  bad.sheets.assign(8, {std::vector<int>(14, 1)});
  bad.sheets[5].answers.pop_back();
  auto findings = pss::validate_dataset(bad, kScale);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].message == "row 6: expected 14 answers, got 13");

  bad.row_provenance = {2, 3, 4, 5, 6, 7, 8, 9};
  bad.sheets[1].answers[0] = 9;
  findings = pss::validate_dataset(bad, kScale);
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].row == 3);
  CHECK(findings[1].message == "row 7: expected 14 answers, got 13");
}
