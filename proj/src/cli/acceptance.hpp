#pragma once

// The acceptance matrix: one check per criterion, each returning a verdict,
// a one-line detail and its measured numbers.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cvtele::cli {

struct AcceptanceOptions {
  int n_max = 40;
  std::uint64_t seed = 7;
};

struct CheckInfo {
  int id = 0;
  std::string name;
  std::string summary;
  std::vector<std::string> tags;
};

struct CheckResult {
  CheckInfo info;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json metrics = nlohmann::json::object();
};

const std::vector<CheckInfo>& acceptance_matrix();

/// Runs check `id`; exceptions become failures carrying the error text.
CheckResult run_check(int id, const AcceptanceOptions& opts);

/// "PASS  [1] name  detail  (1.23 s)"
std::string format_result(const CheckResult& r);

nlohmann::json to_json(const CheckResult& r);

}  // namespace cvtele::cli
