#ifndef BRANCHPCR_CLI_HPP
#define BRANCHPCR_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "branchpcr/estimator.hpp"
#include "branchpcr/moments.hpp"
#include "branchpcr/schedule.hpp"

namespace branchpcr::cli {

/// Parsed run configuration. Exactly one schedule form and at most one
/// mutation form; everything else optional.
struct RunConfig {
  std::int64_t s0 = 1;
  EfficiencySchedule schedule;
  std::optional<MutationLaw> mutation;
  int n = 0;
  std::optional<int> ell;
  std::optional<double> t;
  double z = 2.0;
  std::optional<std::uint64_t> seed;
  long replicates = 1000;
  VppWeighting weighting = VppWeighting::alpha;
  bool strict = false;
  std::int64_t population_cap = 100'000'000;
};

/// Throws ConfigError on schema violations.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Reference data set with pinned expected values and tolerances.
nlohmann::json golden_fixture();

/// Rounds every floating-point value to 12 significant digits.
nlohmann::json round_numbers(const nlohmann::json& j);

/// Flattens a JSON object to "key,value" CSV rows with dotted keys.
std::string flatten_csv(const nlohmann::json& j);

nlohmann::json cmd_bounds(const RunConfig& cfg);
nlohmann::json cmd_estimate(const RunConfig& cfg);
/// Runs the reference data set; "pass" is false on any mismatch.
nlohmann::json cmd_golden(const nlohmann::json& fixture);
nlohmann::json cmd_simulate(const RunConfig& cfg, std::uint64_t seed, unsigned threads);
nlohmann::json cmd_mm(const RunConfig& cfg);

/// Entry point; returns the process exit code (0 ok, 1 golden mismatch or
/// property violation, 2 config error, 3 domain error, 4 resource cap).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace branchpcr::cli

#endif  // BRANCHPCR_CLI_HPP
