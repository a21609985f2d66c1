#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cvtele::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAcceptance = 1;
inline constexpr int kExitConfig = 2;

/// Everything a run can be parameterized by. Unset optionals take the
/// command's default, which is written back before the run is recorded.
struct RunConfig {
  std::string command;
  std::vector<double> r;
  std::optional<double> transmission;
  std::optional<double> nbar;
  std::optional<int> n_max;
  double extent = 0.0;
  std::optional<int> resolution;
  bool renormalize = false;
  std::string quadrature = "trapezoid";
  std::uint64_t seed = 7;
  std::string input = "vacuum";
  std::string state;
  std::optional<std::size_t> samples;
  double signal_var = 2.0;
  double r_min = 0.0;
  double r_max = 1.5;
  double r_step = 0.25;
  std::vector<int> only;
  bool list = false;
  std::string out;
};

nlohmann::json to_json(const RunConfig& c);

/// Applies keys of a --config file on top of `c`. Dashes and underscores in
/// keys are interchangeable; unknown keys throw ConfigError.
void apply_overrides(RunConfig& c, const nlohmann::json& j);

/// Versioned table of every default the acceptance numbers depend on.
nlohmann::json defaults_table();

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

/// Runs an already-resolved config; throws on configuration errors.
int dispatch(RunConfig c);

}  // namespace cvtele::cli
