#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace dtl {

// One checked claim inside an experiment run.  `expected` and `observed`
// are JSON values so counts, booleans and witness names all fit.
struct Assertion {
  std::string description;
  nlohmann::ordered_json expected;
  nlohmann::ordered_json observed;
  bool pass = false;
};

// Machine-readable outcome of an experiment or audit: the overall verdict
// is the conjunction of the individual assertions, never stored separately.
struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Assertion> assertions;
  double elapsed_seconds = 0.0;

  bool passed() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return true;
  }

  void check(std::string description, nlohmann::ordered_json expected,
             nlohmann::ordered_json observed) {
    bool ok = expected == observed;
    assertions.push_back(
        {std::move(description), std::move(expected), std::move(observed), ok});
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["experiment"] = experiment;
    doc["parameters"] = parameters;
    doc["assertions"] = nlohmann::ordered_json::array();
    for (const auto& a : assertions) {
      nlohmann::ordered_json row;
      row["description"] = a.description;
      row["expected"] = a.expected;
      row["observed"] = a.observed;
      row["pass"] = a.pass;
      doc["assertions"].push_back(std::move(row));
    }
    doc["pass"] = passed();
    doc["elapsed"] = elapsed_seconds;
    return doc;
  }
};

}  // namespace dtl
