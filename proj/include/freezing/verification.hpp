#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace freezing {

struct VerifyOptions {
  /// Reduced N and M; a smoke run, not an acceptance run.
  bool quick = false;
  std::uint64_t seed = 20261016;
  unsigned threads = 1;
};

struct CriterionResult {
  std::string id;    // "A1" .. "A10"
  std::string name;  // suite name, e.g. "nonstandard-dirichlet"
  bool pass = false;
  double seconds = 0.0;
  /// One-line human summary of the decisive numbers.
  std::string summary;
  nlohmann::json details;
};

/// Suite names in criterion order, without "all".
const std::vector<std::string>& suite_names();

/// Accepts either the criterion id ("A3") or its suite name ("as-rate").
/// Throws ConfigError for unknown names.
CriterionResult run_criterion(std::string_view which, const VerifyOptions& options);

/// "all" or a single suite.
std::vector<CriterionResult> run_suite(std::string_view which, const VerifyOptions& options);

/// "A3 as-rate FAIL (12.1 s) ..." without trailing newline.
std::string result_line(const CriterionResult& r);

nlohmann::json to_report(const std::vector<CriterionResult>& results, const VerifyOptions& options);

}  // namespace freezing
