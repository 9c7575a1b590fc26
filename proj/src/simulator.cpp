#include "tunnelpl/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "tunnelpl/format.hpp"

namespace tunnelpl {

void ReferenceScenario::validate() const {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ValidationError("noise_sigma must be >= 0");
  if (iterations < 1) throw ValidationError("iterations must be >= 1");
}

std::string policy_label(const PlacementPolicy& policy) {
  if (const auto* u = std::get_if<UniformPlacement>(&policy)) return "uniform-" + std::to_string(u->count);
  const auto& e = std::get<ExplicitPlacement>(policy);
  std::string out = "explicit";
  for (std::size_t i = 0; i < e.positions.size(); ++i) out += (i == 0 ? "-" : "_") + format_double(e.positions[i]);
  return out;
}

PlacementPolicy parse_policy(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("policy '" + text + "' must look like uniform:<N> or explicit:<x1>,<x2>,...");
  }
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "uniform") {
    double n = 0.0;
    if (!parse_double(rest, n) || n < 1.0 || n != std::floor(n)) {
      throw ValidationError("policy '" + text + "': uniform count must be a positive integer");
    }
    return UniformPlacement{static_cast<std::size_t>(n)};
  }
  if (kind == "explicit") {
    ExplicitPlacement e;
    std::istringstream in(rest);
    std::string field;
    while (std::getline(in, field, ',')) {
      double x = 0.0;
      if (!parse_double(field, x)) throw ValidationError("policy '" + text + "': bad position '" + field + "'");
      e.positions.push_back(x);
    }
    if (e.positions.empty()) throw ValidationError("policy '" + text + "': no positions");
    return e;
  }
  throw ValidationError("unknown placement policy kind '" + kind + "'");
}

std::vector<PlacementPolicy> reference_policies() {
  return {UniformPlacement{19}, UniformPlacement{14}, UniformPlacement{9},
          ExplicitPlacement{{15.0, 30.0, 270.0, 285.0}}};
}

TunnelGeometry place_anchors(const PlacementPolicy& policy, const TunnelGeometry& geometry) {
  if (const auto* u = std::get_if<UniformPlacement>(&policy)) {
    if (u->count < 1) throw ValidationError("uniform placement needs at least one anchor");
    std::vector<double> xs;
    xs.reserve(u->count);
    const double step = geometry.span() / static_cast<double>(u->count + 1);
    for (std::size_t k = 1; k <= u->count; ++k) xs.push_back(geometry.bs1_pos() + static_cast<double>(k) * step);
    return geometry.with_anchors(std::move(xs));
  }
  return geometry.with_anchors(std::get<ExplicitPlacement>(policy).positions);
}

std::vector<Engagement> sample_iteration(const ReferenceScenario& scenario, Rng& rng) {
  const auto& g = scenario.geometry;
  std::vector<Engagement> out;
  out.reserve(g.anchor_count());
  for (std::size_t i = 0; i < g.anchor_count(); ++i) {
    const auto [d1, d2] = g.anchor_distances(i);
    const double e1 = rng.normal(0.0, scenario.noise_sigma);
    const double e2 = rng.normal(0.0, scenario.noise_sigma);
    out.push_back({i, path_loss(scenario.reference, d1) + e1, path_loss(scenario.reference, d2) + e2});
  }
  return out;
}

Rng make_stream(std::uint64_t seed, const PlacementPolicy& policy) { return Rng(seed, fnv1a64(policy_label(policy))); }

ConvergenceTrace run_convergence(const ReferenceScenario& scenario, const PlacementPolicy& policy) {
  scenario.validate();
  ReferenceScenario sc = scenario;
  sc.geometry = place_anchors(policy, scenario.geometry);
  Rng rng = make_stream(sc.seed, policy);

  ConvergenceTrace trace{policy_label(policy), sc.seed, sc.reference, {}};
  trace.per_iteration.reserve(sc.iterations);
  TrainingSet ts;
  std::optional<TemplateModel> last;
  for (std::size_t t = 1; t <= sc.iterations; ++t) {
    for (const auto& e : sample_iteration(sc, rng)) record_engagement(ts, sc.geometry, e.anchor_index, e.l1, e.l2, t);
    TraceEntry entry{t, std::nullopt, last, std::nan(""), std::nullopt};
    try {
      const FitResult fit = fit_from_training_set(ts, sc.fit);
      entry.fit = fit.model;
      entry.effective = fit.model;
      entry.sse = fit.sse;
      last = fit.model;
    } catch (const Error& err) {
      entry.failure = err.kind();
    }
    trace.per_iteration.push_back(std::move(entry));
  }
  return trace;
}

std::vector<ConvergenceTrace> run_experiment_matrix(const ReferenceScenario& base,
                                                    const std::vector<PlacementPolicy>& policies,
                                                    const std::vector<std::uint64_t>& seeds, unsigned threads) {
  if (policies.empty() || seeds.empty()) throw PreconditionError("experiment matrix needs policies and seeds");
  base.validate();
  for (const auto& p : policies) place_anchors(p, base.geometry);  // surface layout errors before fanning out
  const std::size_t jobs = policies.size() * seeds.size();
  std::vector<std::optional<ConvergenceTrace>> slots(jobs);

  auto run_job = [&](std::size_t j) {
    ReferenceScenario sc = base;
    sc.seed = seeds[j % seeds.size()];
    slots[j] = run_convergence(sc, policies[j / seeds.size()]);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
      });
    }
  }

  std::vector<ConvergenceTrace> out;
  out.reserve(jobs);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace tunnelpl
