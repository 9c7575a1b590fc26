// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Runs the library directly and the CLI through popen.

#include <tunnelpl/commands.hpp>
#include <tunnelpl/estimator.hpp>
#include <tunnelpl/format.hpp>
#include <tunnelpl/locator.hpp>
#include <tunnelpl/model.hpp>
#include <tunnelpl/rng.hpp>
#include <tunnelpl/simulator.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"

using namespace tunnelpl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. Forward model at the reference parameters.
Outcome forward_exactness() {
  const TemplateModel m = reference_model();
  const double at50 = path_loss(m, 50.0), at300 = path_loss(m, 300.0);
  const bool ok = std::abs(at50 - 74.1794) <= 1e-4 && std::abs(at300 - 124.1794) <= 1e-4;
  return {ok, "L(50)=" + format_double(at50) + " L(300)=" + format_double(at300)};
}

// 2. invert(forward(d)) == d for random models and distances.
Outcome inversion_round_trip() {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> g(1.0, 4.0), c(0.0, 40.0), d0(5.0, 200.0), a(0.05, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const TemplateModel m(g(gen), c(gen), d0(gen), a(gen));
    // Distances log-uniform from 1 cm to 10x the break point.
    std::uniform_real_distribution<double> logd(-2.0, std::log10(10.0 * m.d0()));
    for (int k = 0; k < 1000; ++k) {
      const double d = std::pow(10.0, logd(gen));
      worst = std::max(worst, std::abs(invert_distance(m, path_loss(m, d)) - d) / d);
    }
  }
  return {worst < 1e-9, "max relative error " + fmt(worst)};
}

// 3. Noiseless reference samples at the four explicit anchors, both directions.
Outcome noiseless_identifiability() {
  const TemplateModel ref = reference_model();
  const TunnelGeometry geo(0.0, 300.0, {15.0, 30.0, 270.0, 285.0});
  TrainingSet ts;
  for (std::size_t i = 0; i < geo.anchor_count(); ++i) {
    const auto [a1, a2] = geo.anchor_distances(i);
    record_engagement(ts, geo, i, path_loss(ref, a1), path_loss(ref, a2), 1);
  }
  const FitResult fit = fit_from_training_set(ts);
  auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  const double eg = rel(fit.model.gamma(), ref.gamma()), ec = rel(fit.model.c(), ref.c()),
               ea = rel(fit.model.alpha(), ref.alpha()), ed = std::abs(fit.model.d0() - ref.d0());
  const bool ok = eg <= 1e-6 && ec <= 1e-6 && ea <= 1e-6 && ed <= 1e-3;
  return {ok, "rel gamma " + fmt(eg) + ", rel C " + fmt(ec) + ", rel alpha " + fmt(ea) + ", |d0| " + fmt(ed) + " m"};
}

// 4. Separable fit vs brute force over (gamma, C, alpha, d0).
Outcome oracle_equivalence() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> g(1.5, 3.0), c(10.0, 30.0), d0(20.0, 80.0), a(0.05, 0.5), d(1.0, 150.0);
  std::normal_distribution<double> noise(0.0, 1.5);
  int checked = 0, skipped = 0;
  double worst = -std::numeric_limits<double>::infinity();
  while (checked < 50) {
    const TemplateModel m(g(gen), c(gen), d0(gen), a(gen));
    const int n = 6 + static_cast<int>(gen() % 5);
    std::vector<MeasurementPoint> pts;
    std::vector<oracle::Pt> opts;
    for (int i = 0; i < n; ++i) {
      const double x = d(gen), l = path_loss(m, x) + noise(gen);
      pts.push_back({x, l});
      opts.push_back({x, l});
    }
    std::optional<FitResult> fit;
    try {
      fit = fit_template(pts);
    } catch (const Error&) {
      ++skipped;  // no admissible two-piece fit; nothing to compare
      continue;
    }
    double lo = opts[0].d, hi = lo;
    for (const auto& p : opts) lo = std::min(lo, p.d), hi = std::max(hi, p.d);
    const auto brute = oracle::brute_force_fit(opts, lo, hi);
    worst = std::max(worst, fit->sse - brute.sse);
    ++checked;
  }
  return {worst <= 1e-3, "max (fit sse - brute sse) " + fmt(worst) + " dB^2 over 50 instances (" +
                             std::to_string(skipped) + " unidentifiable draws skipped)"};
}

// 5. Convergence matrix with bootstrap confidence over seeds.
struct ParamErrors {
  std::array<double, 4> at5{}, at100{};
};

std::array<double, 4> abs_errors(const TemplateModel& m, const TemplateModel& ref) {
  return {std::abs(m.gamma() - ref.gamma()), std::abs(m.c() - ref.c()), std::abs(m.d0() - ref.d0()),
          std::abs(m.alpha() - ref.alpha())};
}

constexpr std::array<const char*, 4> kParamNames{"gamma", "C", "d0", "alpha"};

Outcome convergence_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  ReferenceScenario base;
  base.noise_sigma = 1.25;
  base.iterations = 100;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 40; ++s) seeds.push_back(s);
  const auto policies = reference_policies();  // U19, U14, U9, E{15,30,270,285}
  const auto traces = run_experiment_matrix(base, policies, seeds);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // errors[policy][seed]
  std::vector<std::vector<ParamErrors>> errors(policies.size());
  int missing = 0;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& tr = traces[p * seeds.size() + s];
      const auto& e5 = tr.per_iteration[4].effective;
      const auto& e100 = tr.per_iteration[99].effective;
      ParamErrors pe;
      pe.at5.fill(std::numeric_limits<double>::infinity());
      pe.at100.fill(std::numeric_limits<double>::infinity());
      if (e5) pe.at5 = abs_errors(*e5, base.reference);
      if (e100) pe.at100 = abs_errors(*e100, base.reference);
      if (!e5 || !e100) ++missing;
      errors[p].push_back(pe);
    }
  }

  // Fraction of bootstrap resamples (seeds drawn with replacement, paired
  // across policies) in which `holds` is true.
  std::mt19937_64 gen(5);
  const std::size_t n = seeds.size();
  auto confidence = [&](const std::function<bool(const std::vector<std::size_t>&)>& holds) {
    constexpr int kResamples = 2000;
    int wins = 0;
    std::vector<std::size_t> idx(n);
    for (int b = 0; b < kResamples; ++b) {
      for (auto& i : idx) i = gen() % n;
      wins += holds(idx) ? 1 : 0;
    }
    return static_cast<double>(wins) / kResamples;
  };
  auto mean_at = [&](std::size_t policy, int param, bool final, const std::vector<std::size_t>& idx) {
    double sum = 0.0;
    for (auto i : idx) sum += final ? errors[policy][i].at100[param] : errors[policy][i].at5[param];
    return sum / static_cast<double>(idx.size());
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  bool ok = true;
  std::ostringstream detail;
  const std::size_t u19 = 0, u9 = 2, e4 = 3;
  for (std::size_t p : {u19, e4}) {
    for (int k = 0; k < 4; ++k) {
      const double conf = confidence([&](const auto& idx) { return mean_at(p, k, true, idx) < mean_at(p, k, false, idx); });
      const bool pass = conf >= 0.95;
      ok = ok && pass;
      detail << "\n    (a) " << policy_label(policies[p]) << " " << kParamNames[k] << ": err@5 "
             << fmt(mean_at(p, k, false, all)) << " -> err@100 " << fmt(mean_at(p, k, true, all)) << ", confidence "
             << fmt(conf) << (pass ? "" : "  <-- fails");
    }
  }
  for (int k : {0, 2}) {
    const double conf = confidence([&](const auto& idx) { return mean_at(e4, k, true, idx) < mean_at(u9, k, true, idx); });
    const bool pass = conf >= 0.95;
    ok = ok && pass;
    detail << "\n    (b) " << kParamNames[k] << ": " << policy_label(policies[e4]) << " err@100 "
           << fmt(mean_at(e4, k, true, all)) << " vs " << policy_label(policies[u9]) << " "
           << fmt(mean_at(u9, k, true, all)) << ", confidence " << fmt(conf) << (pass ? "" : "  <-- fails");
  }
  const bool fast = seconds < 60.0;
  ok = ok && fast && missing == 0;
  return {ok, std::to_string(seeds.size()) + " seeds x " + std::to_string(policies.size()) + " policies in " +
                  fmt(seconds) + " s" + (missing ? ", " + std::to_string(missing) + " traces without a fit" : "") +
                  detail.str()};
}

// 6. normalize_pair sums to D and keeps the ratio.
Outcome normalization_identity() {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> dist(0.01, 1000.0);
  double worst_sum_ulps = 0.0, worst_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d1 = dist(gen), d2 = dist(gen), span = dist(gen);
    const auto n = normalize_pair(d1, d2, span);
    const double ulp = std::nextafter(span, INFINITY) - span;
    worst_sum_ulps = std::max(worst_sum_ulps, std::abs(n.d1 + n.d2 - span) / ulp);
    worst_ratio = std::max(worst_ratio, std::abs(n.d1 / n.d2 - d1 / d2) / (d1 / d2));
  }
  // The ratio is preserved up to the rounding of a handful of operations.
  constexpr double kRatioTol = 8.0 * std::numeric_limits<double>::epsilon();
  return {worst_sum_ulps <= 1.0 && worst_ratio <= kRatioTol,
          "max |sum - D| " + fmt(worst_sum_ulps) + " ulp, max relative ratio change " + fmt(worst_ratio)};
}

// 7. CLI: simulate -> fit -> locate, twice, byte for byte.
struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TUNNELPL_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t k = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), k);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome end_to_end_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / ("tunnelpl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const TemplateModel ref = reference_model();
  const std::string l1 = format_double(path_loss(ref, 100.0)), l2 = format_double(path_loss(ref, 200.0));

  std::array<std::string, 2> campaign, model, located;
  bool exits_ok = true;
  for (int r = 0; r < 2; ++r) {
    // Same paths both times: the model records its source file.
    const fs::path csv = dir / "campaign.csv";
    const fs::path json = dir / "model.json";
    fs::remove(csv);
    fs::remove(json);
    exits_ok = exits_ok && run_cli("simulate --sigma 0 --seed 7 -o " + csv.string()).exit_code == 0;
    exits_ok = exits_ok &&
               run_cli("fit " + csv.string() + " --timestamp 2000-01-01T00:00:00Z -o " + json.string()).exit_code == 0;
    const RunResult loc = run_cli("locate --model " + json.string() + " --l1 " + l1 + " --l2 " + l2);
    exits_ok = exits_ok && loc.exit_code == 0;
    campaign[r] = slurp(csv);
    model[r] = slurp(json);
    located[r] = loc.out;
  }
  fs::remove_all(dir);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double position = std::numeric_limits<double>::quiet_NaN();
  try {
    position = nlohmann::json::parse(located[0]).at("position_m").get<double>();
  } catch (const std::exception&) {
  }
  const bool identical = campaign[0] == campaign[1] && model[0] == model[1] && located[0] == located[1];
  const bool ok = exits_ok && identical && std::abs(position - 100.0) <= 1e-3 && seconds < 5.0;
  return {ok, "position " + format_double(position) + " m, outputs " + (identical ? "identical" : "differ") +
                  ", exits " + (exits_ok ? "ok" : "NOT ok") + ", " + fmt(seconds) + " s"};
}

// 8. Corridor: self-fitted break point vs break point fixed at its generating value.
Outcome positioning_parity() {
  const auto t0 = std::chrono::steady_clock::now();
  // 2.4 GHz, both antennas 1 m above the floor.
  const double d0 = fresnel_break_point(FresnelParams{1.0, 1.0, 0.125});
  const TemplateModel truth(2.0, 20.1, d0, 0.2);
  std::vector<double> anchors;
  for (int x = 2; x <= 76; x += 2) anchors.push_back(x);
  const TunnelGeometry corridor(0.0, 80.0, anchors);
  constexpr double kSigma = 1.25;
  constexpr int kTrials = 20;

  double err_self = 0.0, err_fixed = 0.0;
  int located = 0;
  for (int trial = 1; trial <= kTrials; ++trial) {
    Rng rng(static_cast<std::uint64_t>(trial), fnv1a64("corridor"));
    TrainingSet ts;
    for (std::size_t i = 0; i < corridor.anchor_count(); ++i) {
      const auto [a1, a2] = corridor.anchor_distances(i);
      record_engagement(ts, corridor, i, rng.normal(path_loss(truth, a1), kSigma),
                        rng.normal(path_loss(truth, a2), kSigma), 1);
    }
    const TemplateModel self = fit_from_training_set(ts).model;
    FitOptions fixed_opts;
    fixed_opts.fixed_d0 = d0;
    const TemplateModel fixed = fit_from_training_set(ts, fixed_opts).model;

    // Independent noisy readings at every sample position.
    for (std::size_t i = 0; i < corridor.anchor_count(); ++i) {
      const double x = anchors[i];
      const double l1 = rng.normal(path_loss(truth, x), kSigma), l2 = rng.normal(path_loss(truth, 80.0 - x), kSigma);
      try {
        const double ps = locate_two_bs(self, corridor, l1, l2).position;
        const double pf = locate_two_bs(fixed, corridor, l1, l2).position;
        err_self += std::abs(ps - x);
        err_fixed += std::abs(pf - x);
        ++located;
      } catch (const InversionError&) {
      }
    }
  }
  err_self /= located;
  err_fixed /= located;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double gap = std::abs(err_self - err_fixed) / err_fixed;
  return {gap <= 0.10 && seconds < 10.0,
          "mean |error| self-fit " + fmt(err_self) + " m vs fixed break point " + fmt(err_fixed) + " m (" +
              fmt(100.0 * gap) + "% apart, " + std::to_string(located) + " fixes, " + fmt(seconds) + " s)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"forward model exactness", forward_exactness},
      {"inversion round trip", inversion_round_trip},
      {"noiseless identifiability", noiseless_identifiability},
      {"brute-force oracle equivalence", oracle_equivalence},
      {"convergence reproduction", convergence_reproduction},
      {"normalization identity", normalization_identity},
      {"end-to-end CLI pipeline", end_to_end_pipeline},
      {"corridor positioning parity", positioning_parity},
  };
  int failed = 0;
  int number = 0;
  for (const auto& [name, check] : criteria) {
    ++number;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << number << "] " << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " of " : "all ") << criteria.size()
            << (failed ? " criteria failed" : " criteria passed") << std::endl;
  return failed ? 1 : 0;
}
