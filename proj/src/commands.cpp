#include "tunnelpl/commands.hpp"

#include <chrono>
#include <ctime>

#include "tunnelpl/format.hpp"

namespace tunnelpl {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return exit_code::kParse;
    case ErrorKind::Validation:
    case ErrorKind::Precondition:
    case ErrorKind::Domain: return exit_code::kValidation;
    case ErrorKind::Identifiability:
    case ErrorKind::Degenerate: return exit_code::kIdentifiability;
    case ErrorKind::Inversion: return exit_code::kInversion;
  }
  return exit_code::kInternal;
}

Campaign simulate_campaign(const SimulateConfig& config) {
  ReferenceScenario sc;
  sc.reference = config.reference;
  sc.geometry = place_anchors(config.placement, TunnelGeometry(config.bs1_pos, config.bs2_pos));
  sc.noise_sigma = config.noise_sigma;
  sc.iterations = config.iterations;
  sc.seed = config.seed;
  sc.validate();

  Campaign c;
  c.tunnel_id = config.tunnel_id;
  c.bs1_pos = config.bs1_pos;
  c.bs2_pos = config.bs2_pos;
  c.metadata = {
      {"synthetic", "true"},
      {"generator", "tunnelpl simulate"},
      {"reference", "gamma=" + format_double(config.reference.gamma()) + " c=" + format_double(config.reference.c()) +
                        " d0=" + format_double(config.reference.d0()) +
                        " alpha=" + format_double(config.reference.alpha())},
      {"placement", policy_label(config.placement)},
      {"noise_sigma_db", format_double(config.noise_sigma)},
      {"seed", std::to_string(config.seed)},
  };
  Rng rng = make_stream(config.seed, config.placement);
  for (std::size_t t = 1; t <= sc.iterations; ++t) {
    for (const auto& e : sample_iteration(sc, rng)) {
      c.rows.push_back({sc.geometry.anchors()[e.anchor_index], e.l1, e.l2, t});
    }
  }
  return c;
}

nlohmann::json fit_options_to_json(const FitOptions& o) {
  nlohmann::json j;
  j["grid_resolution_m"] = o.grid_resolution;
  j["refine_tolerance_m"] = o.refine_tolerance;
  j["samples"] = o.samples == SampleMode::Means ? "means" : "raw";
  j["nonnegative_alpha"] = o.nonnegative_alpha;
  j["station"] = o.station ? (*o.station == BaseStation::One ? "bs1" : "bs2") : "pooled";
  if (o.d0_min) j["d0_min_m"] = *o.d0_min;
  if (o.d0_max) j["d0_max_m"] = *o.d0_max;
  if (o.d0_hint) j["d0_hint_m"] = *o.d0_hint;
  if (o.fixed_d0) j["fixed_d0_m"] = *o.fixed_d0;
  return j;
}

ModelFile fit_campaign(const Campaign& campaign, const FitConfig& config) {
  const TrainingSet ts = campaign_training_set(campaign);
  const FitResult fit = fit_from_training_set(ts, config.options);
  ModelFile f{fit.model, fit.sse, nlohmann::json::object()};
  f.provenance["source"] = config.source;
  f.provenance["tunnel"] = campaign.tunnel_id;
  f.provenance["fit_options"] = fit_options_to_json(config.options);
  f.provenance["near_count"] = fit.near_count;
  f.provenance["far_count"] = fit.far_count;
  f.provenance["observations"] = ts.observations().size();
  f.provenance["timestamp"] = config.timestamp;
  return f;
}

std::vector<ConvergenceTrace> run_convergence_matrix(const ConvergenceConfig& config) {
  return run_experiment_matrix(config.base, config.policies, config.seeds, config.threads);
}

nlohmann::json position_report(const PositionEstimate& e, const char* mode) {
  nlohmann::json j;
  j["mode"] = mode;
  j["position_m"] = e.position;
  j["normalized"] = e.normalized;
  j["d1_raw_m"] = e.d1_raw;
  j["d1_m"] = e.d1;
  j["d2_raw_m"] = e.d2_raw ? nlohmann::json(*e.d2_raw) : nlohmann::json(nullptr);
  j["d2_m"] = e.d2 ? nlohmann::json(*e.d2) : nlohmann::json(nullptr);
  j["warnings"] = e.warnings;
  return j;
}

nlohmann::json error_report(const Error& error) {
  return {{"error", {{"code", to_string(error.kind())}, {"message", error.what()}, {"exit_code", exit_code_for(error.kind())}}}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace tunnelpl
