#pragma once

#include "rwrt/io.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rwrt {

struct VerifyConfig {
  std::uint64_t seed = 20240611;
  std::optional<Index> replicates;  // replaces every Monte Carlo count when set
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

  void validate() const;
};

Json to_json(const VerifyConfig& c);

struct CriterionInfo {
  int id;
  std::string name;
  double budget_seconds;
};

const std::vector<CriterionInfo>& criterion_table();

enum class Outcome { pass, fail, parameter_error, numeric_error };

struct CriterionResult {
  int id = 0;
  std::string name;
  Outcome outcome = Outcome::fail;
  Json metrics;
  std::string error;     // module-tagged message when the run threw
  double seconds = 0.0;  // wall time; kept out of the JSON

  bool passed() const { return outcome == Outcome::pass; }
};

Json to_json(const CriterionResult& r);

/// Criteria 1-10.  Criterion 11 needs the others and goes through run_suite.
CriterionResult run_criterion(int id, const VerifyConfig& config);

/// Runs the selected criteria in ascending order; on_result fires after each.
std::vector<CriterionResult> run_suite(const VerifyConfig& config,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

/// Verdict document: schema version, seed, config hash, per-criterion results.
Json suite_json(const VerifyConfig& config, const std::vector<CriterionResult>& results);

/// 0 all pass, 1 any check failed, 2 parameter error, 3 numeric/resource error.
int exit_code(const std::vector<CriterionResult>& results);

}  // namespace rwrt
