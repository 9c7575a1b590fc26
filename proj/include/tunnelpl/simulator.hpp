#pragma once

// Monte Carlo reproduction of the convergence experiment: noisy samples of a
// reference model at the anchors, accumulated pass by pass and refitted after
// every pass.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tunnelpl/errors.hpp"
#include "tunnelpl/estimator.hpp"
#include "tunnelpl/model.hpp"
#include "tunnelpl/rng.hpp"

namespace tunnelpl {

struct ReferenceScenario {
  TemplateModel reference = reference_model();
  TunnelGeometry geometry{0.0, 300.0};
  double noise_sigma = 1.25;  // dB
  std::size_t iterations = 100;
  std::uint64_t seed = 1;
  FitOptions fit{};
  // Documented only; noise is specified by noise_sigma.
  double nominal_snr_db = -2.0;

  /// Throws ValidationError on negative sigma or zero iterations.
  void validate() const;
};

struct UniformPlacement {
  std::size_t count;
};

struct ExplicitPlacement {
  std::vector<double> positions;
};

using PlacementPolicy = std::variant<UniformPlacement, ExplicitPlacement>;

/// Stable textual label, e.g. "uniform-19" or "explicit-15_30_270_285".
std::string policy_label(const PlacementPolicy& policy);

/// Parses "uniform:19" or "explicit:15,30,270,285". Throws ValidationError.
PlacementPolicy parse_policy(const std::string& text);

/// The four layouts of the validation experiment: 19, 14 and 9 uniform
/// anchors plus four anchors near the base stations.
std::vector<PlacementPolicy> reference_policies();

TunnelGeometry place_anchors(const PlacementPolicy& policy, const TunnelGeometry& geometry);

struct Engagement {
  std::size_t anchor_index;
  double l1;  // dB at BS1
  double l2;  // dB at BS2
};

/// One pass of an object through every anchor, with independent Gaussian
/// noise on each of the two losses.
std::vector<Engagement> sample_iteration(const ReferenceScenario& scenario, Rng& rng);

/// Generator for the (policy, seed) entry of an experiment.
Rng make_stream(std::uint64_t seed, const PlacementPolicy& policy);

struct TraceEntry {
  std::size_t iteration;            // 1-based
  std::optional<TemplateModel> fit;  // empty when this iteration's fit failed
  std::optional<TemplateModel> effective;  // last successful fit, carried forward
  double sse;                       // NaN on failure
  std::optional<ErrorKind> failure;
};

struct ConvergenceTrace {
  std::string policy;
  std::uint64_t seed;
  TemplateModel reference;
  std::vector<TraceEntry> per_iteration;
};

ConvergenceTrace run_convergence(const ReferenceScenario& scenario, const PlacementPolicy& policy);

/// Runs every (policy, seed) pair. Output is ordered by policy (input order)
/// then seed (input order) and does not depend on `threads`.
std::vector<ConvergenceTrace> run_experiment_matrix(const ReferenceScenario& base,
                                                    const std::vector<PlacementPolicy>& policies,
                                                    const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

}  // namespace tunnelpl
