#include "doctest.h"

#include <stdexcept>
#include <string>
#include <vector>

#include "dtl/experiments.hpp"
#include "dtl/report.hpp"
#include "dtl/selftest.hpp"
#include "json.hpp"

using nlohmann::ordered_json;

namespace {

// Serialized report with the wall-clock field removed, so two runs of the
// same experiment can be compared byte for byte.
std::string stable_dump(const dtl::ExperimentReport& report) {
  ordered_json doc = report.to_json();
  doc.erase("elapsed");
  return doc.dump();
}

}  // namespace

TEST_CASE("separation experiment passes on its smallest cells") {
  for (int k : {1, 2}) {
    dtl::ExperimentReport report = dtl::cmd_experiment_separation(k, 2, 7);
    CAPTURE(k);
    CHECK(report.experiment == "separation");
    CHECK(report.parameters == ordered_json({{"k", k}, {"n", 2}, {"seed", 7}}));
    REQUIRE(report.assertions.size() == 5);
    for (const auto& a : report.assertions) {
      CAPTURE(a.description);
      CHECK(a.pass);
    }
    CHECK(report.passed());
  }
}

TEST_CASE("separation report keeps the shared report layout") {
  ordered_json doc = dtl::cmd_experiment_separation(1, 2, 3).to_json();
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"experiment", "parameters",
                                         "assertions", "pass", "elapsed"});
  REQUIRE(doc["assertions"].is_array());
  for (const auto& row : doc["assertions"]) {
    CHECK(row.contains("description"));
    CHECK(row.contains("expected"));
    CHECK(row.contains("observed"));
    CHECK(row["pass"] == true);
  }
  CHECK(doc["pass"] == true);
  CHECK(doc["elapsed"].is_number());
}

TEST_CASE("separation rejects out-of-range parameters") {
  CHECK_THROWS_AS(dtl::cmd_experiment_separation(0, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(dtl::cmd_experiment_separation(1, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("expressiveness experiment passes on its smallest cells") {
  for (int k : {1, 2}) {
    for (int n : {1, 2}) {
      CAPTURE(k);
      CAPTURE(n);
      dtl::ExperimentReport report = dtl::cmd_experiment_expressiveness(k, n);
      CHECK(report.experiment == "expressiveness");
      CHECK(report.parameters == ordered_json({{"k", k}, {"n", n}}));
      // The width-capped definability sweep only applies to the width-1 cell.
      REQUIRE(report.assertions.size() == (k == 1 ? 3u : 2u));
      for (const auto& a : report.assertions) {
        CAPTURE(a.description);
        CHECK(a.pass);
      }
      CHECK(report.passed());
    }
  }
}

TEST_CASE("expressiveness rejects out-of-range parameters") {
  CHECK_THROWS_AS(dtl::cmd_experiment_expressiveness(0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(dtl::cmd_experiment_expressiveness(1, 0),
                  std::invalid_argument);
}

TEST_CASE("selftest covers every module and passes") {
  std::vector<dtl::ExperimentReport> reports = dtl::run_selftest();
  REQUIRE(reports.size() == 5);
  const std::vector<std::pair<std::string, std::size_t>> expected = {
      {"selftest_formula_core", 5},   {"selftest_kripke_semantics", 7},
      {"selftest_bisimulation", 5},   {"selftest_model_gallery", 6},
      {"selftest_proof_kernel", 5},
  };
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CAPTURE(reports[i].experiment);
    CHECK(reports[i].experiment == expected[i].first);
    CHECK(reports[i].assertions.size() == expected[i].second);
    for (const auto& a : reports[i].assertions) {
      CAPTURE(a.description);
      CHECK(a.pass);
    }
    CHECK(reports[i].passed());
  }
}

TEST_CASE("experiment reports are deterministic apart from elapsed time") {
  CHECK(stable_dump(dtl::cmd_experiment_separation(1, 2, 5)) ==
        stable_dump(dtl::cmd_experiment_separation(1, 2, 5)));
  CHECK(stable_dump(dtl::cmd_experiment_expressiveness(2, 2)) ==
        stable_dump(dtl::cmd_experiment_expressiveness(2, 2)));

  std::vector<dtl::ExperimentReport> first = dtl::run_selftest();
  std::vector<dtl::ExperimentReport> second = dtl::run_selftest();
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    CHECK(stable_dump(first[i]) == stable_dump(second[i]));
}
