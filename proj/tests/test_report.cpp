#include <doctest.h>

#include <algorithm>

#include "pluri/report.hpp"
#include "support.hpp"

using namespace pluri;
using namespace pluri::lab;

namespace {

ExperimentReport sample(std::mt19937_64& rng) {
  ExperimentReport r;
  r.id = "T11-mult";
  r.seed = "0xc0ffee";
  const int rows = gen::integer(rng, 0, 12);
  for (int k = 0; k < rows; ++k) {
    const std::string name = "row " + std::to_string(k) + (k % 3 == 0 ? ", with \"quotes\" | pipes" : "");
    if (gen::integer(rng, 0, 1)) {
      const double special[] = {kInf, -kInf, 0.0, 1e-300, -2.5};
      const double e = k % 4 == 0 ? special[gen::integer(rng, 0, 4)] : gen::uniform(rng, -5, 5);
      r.rows.push_back(CheckRow::value(name, e, gen::uniform(rng, -5, 5), gen::uniform(rng, 0, 1), k % 2 ? "detail" : ""));
    } else {
      r.rows.push_back(CheckRow::predicate(name, true, gen::integer(rng, 0, 1) == 1));
    }
  }
  r.artifacts = {"a.csv"};
  r.wall_seconds = 1.25;
  return r;
}

}  // namespace

TEST_CASE("check rows decide pass from their data") {
  CHECK(CheckRow::value("x", 1.0, 1.05, 0.1).pass);
  CHECK_FALSE(CheckRow::value("x", 1.0, 1.2, 0.1).pass);
  CHECK(CheckRow::value("x", kInf, kInf, 0.0).pass);
  CHECK_FALSE(CheckRow::value("x", 0.0, std::nan(""), 1.0).pass);
  CHECK(CheckRow::predicate("p", true, true).pass);
  CHECK_FALSE(CheckRow::predicate("p", true, false).pass);
}

TEST_CASE("JSON reports round-trip") {
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    auto rng = gen::rng_for(trial, 110);
    const ExperimentReport r = sample(rng);
    const std::string text = render_json(r);
    const ExperimentReport back = from_json(nlohmann::json::parse(text));
    CHECK(render_json(back) == text);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      CHECK(back.rows[k].name == r.rows[k].name);
      CHECK(back.rows[k].pass == r.rows[k].pass);
      CHECK(back.rows[k].expected == r.rows[k].expected);
    }
    CHECK(text.find("wall") == std::string::npos);
  }
}

TEST_CASE("CSV and markdown renderings") {
  auto rng = gen::rng_for(3, 111);
  const ExperimentReport r = sample(rng);
  const std::string csv = render_csv(r);
  CHECK(csv.rfind("experiment,name,kind,expected,observed,tolerance,pass,detail\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= long(r.rows.size()) + 1);
  const std::string md = render_markdown(r);
  CHECK(md.find("wall time: 1.250 s") != std::string::npos);
  CHECK(md.find("| T11-mult |") != std::string::npos);
}

TEST_CASE("formats") {
  CHECK(parse_format("json") == ReportFormat::json);
  CHECK(extension(ReportFormat::md) == "md");
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}
