#pragma once

// Library side of the `tunnelpl` subcommands. The CLI parses flags and config
// files into these structs; everything here is deterministic and stream-based
// so it can be exercised in-process.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tunnelpl/campaign.hpp"
#include "tunnelpl/errors.hpp"
#include "tunnelpl/estimator.hpp"
#include "tunnelpl/locator.hpp"
#include "tunnelpl/model_file.hpp"
#include "tunnelpl/simulator.hpp"

namespace tunnelpl {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kInternal = 1;
inline constexpr int kParse = 2;
inline constexpr int kValidation = 3;
inline constexpr int kIdentifiability = 4;
inline constexpr int kInversion = 5;
}  // namespace exit_code

int exit_code_for(ErrorKind kind) noexcept;

struct SimulateConfig {
  TemplateModel reference = reference_model();
  double bs1_pos = 0.0;
  double bs2_pos = 300.0;
  PlacementPolicy placement = ExplicitPlacement{{15.0, 30.0, 270.0, 285.0}};
  double noise_sigma = 1.25;
  std::size_t iterations = 100;
  std::uint64_t seed = 1;
  std::string tunnel_id = "synthetic";
};

/// Synthetic campaign: `iterations` passes, one row per anchor per pass.
/// Uses the same noise stream as run_convergence for the same policy and seed.
Campaign simulate_campaign(const SimulateConfig& config);

struct FitConfig {
  FitOptions options;
  std::string source;     // campaign path or label recorded in provenance
  std::string timestamp;  // ISO-8601; recorded verbatim
};

/// Fits the campaign and packages the result with provenance.
ModelFile fit_campaign(const Campaign& campaign, const FitConfig& config);

nlohmann::json fit_options_to_json(const FitOptions& options);

struct ConvergenceConfig {
  ReferenceScenario base;
  std::vector<PlacementPolicy> policies = reference_policies();
  std::vector<std::uint64_t> seeds{1};
  unsigned threads = 0;
};

std::vector<ConvergenceTrace> run_convergence_matrix(const ConvergenceConfig& config);

nlohmann::json position_report(const PositionEstimate& estimate, const char* mode);

nlohmann::json error_report(const Error& error);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace tunnelpl
