// tunnelpl: path-loss template fitting and tunnel positioning.
//
//   tunnelpl simulate    synthetic campaign CSV
//   tunnelpl fit         campaign CSV -> model JSON
//   tunnelpl convergence experiment matrix -> trace CSV
//   tunnelpl locate      model JSON + losses -> position JSON
//   tunnelpl eval        model JSON -> curve CSV
//
// Every option may also come from a TOML/INI file given with --config; flags
// on the command line take precedence.

#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "tunnelpl/commands.hpp"
#include "tunnelpl/format.hpp"
#include "tunnelpl/trace_io.hpp"

using namespace tunnelpl;

namespace {

struct ModelFlags {
  double gamma = 2.0;
  double c = 20.1;
  double d0 = 50.0;
  double alpha = 0.2;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--gamma", gamma, "Reference path loss exponent")->capture_default_str();
    cmd->add_option("--c", c, "Reference constant C")->capture_default_str();
    cmd->add_option("--d0", d0, "Reference break point (m)")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Reference far-region slope (dB/m)")->capture_default_str();
  }

  TemplateModel build() const {
    try {
      return TemplateModel(gamma, c, d0, alpha);
    } catch (const DomainError& e) {
      throw ValidationError(std::string("reference model (--gamma/--c/--d0/--alpha): ") + e.what());
    }
  }
};

struct FitFlags {
  double resolution = 0.5;
  double refine_tol = 1e-4;
  std::optional<double> d0_min, d0_max, d0_hint, fixed_d0;
  std::vector<double> fresnel;
  bool nonneg_alpha = false;
  bool raw = false;
  std::string station = "pooled";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--resolution", resolution, "d0 grid resolution (m)")->capture_default_str();
    cmd->add_option("--refine-tol", refine_tol, "d0 golden-section tolerance (m)")->capture_default_str();
    cmd->add_option("--d0-min", d0_min, "Lower end of the d0 grid (m)");
    cmd->add_option("--d0-max", d0_max, "Upper end of the d0 grid (m)");
    auto* hint = cmd->add_option("--d0-hint", d0_hint, "Align the d0 grid on this value (m)");
    cmd->add_option("--fresnel", fresnel, "h_r,h_t,lambda: align the d0 grid on the Fresnel break point")
        ->delimiter(',')
        ->expected(3)
        ->excludes(hint);
    cmd->add_option("--fixed-d0", fixed_d0, "Fit with d0 held at this value (m)");
    cmd->add_flag("--nonneg-alpha", nonneg_alpha, "Constrain the far-region slope to be >= 0");
    cmd->add_flag("--raw", raw, "Fit every sample instead of per-anchor means");
    cmd->add_option("--station", station, "pooled, bs1 or bs2")
        ->check(CLI::IsMember({"pooled", "bs1", "bs2"}))
        ->capture_default_str();
  }

  FitOptions build() const {
    FitOptions o;
    o.grid_resolution = resolution;
    o.refine_tolerance = refine_tol;
    o.d0_min = d0_min;
    o.d0_max = d0_max;
    o.d0_hint = d0_hint;
    if (!fresnel.empty()) o.d0_hint = fresnel_break_point({fresnel[0], fresnel[1], fresnel[2]});
    o.fixed_d0 = fixed_d0;
    o.nonnegative_alpha = nonneg_alpha;
    o.samples = raw ? SampleMode::Raw : SampleMode::Means;
    if (station == "bs1") o.station = BaseStation::One;
    if (station == "bs2") o.station = BaseStation::Two;
    if (!(resolution > 0.0)) throw ValidationError("--resolution must be positive");
    if (!(refine_tol > 0.0)) throw ValidationError("--refine-tol must be positive");
    return o;
  }
};

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  body(out);
}

template <typename Fn>
auto with_input(const std::string& path, Fn&& body) {
  if (path == "-") return body(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return body(in);
}

PlacementPolicy placement_from(std::size_t uniform, const std::vector<double>& anchors) {
  if (uniform > 0 && !anchors.empty()) throw ValidationError("--uniform and --anchors are mutually exclusive");
  if (uniform > 0) return UniformPlacement{uniform};
  if (!anchors.empty()) return ExplicitPlacement{anchors};
  return ExplicitPlacement{{15.0, 30.0, 270.0, 285.0}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-piece path-loss template fitting and positioning for tunnels"};
  app.set_config("--config", "", "TOML/INI file with option values (flags win)");
  app.require_subcommand(1);
  app.fallthrough();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic measurement campaign");
  ModelFlags sim_model;
  sim_model.add_to(sim);
  double sim_bs1 = 0.0, sim_bs2 = 300.0, sim_sigma = 1.25;
  std::size_t sim_uniform = 0, sim_iterations = 100;
  std::uint64_t sim_seed = 1;
  std::vector<double> sim_anchors;
  std::string sim_tunnel = "synthetic", sim_out;
  sim->add_option("--bs1", sim_bs1, "BS1 position (m)")->capture_default_str();
  sim->add_option("--bs2", sim_bs2, "BS2 position (m)")->capture_default_str();
  sim->add_option("--uniform", sim_uniform, "Place N evenly spaced anchors");
  sim->add_option("--anchors", sim_anchors, "Explicit anchor positions (m), comma separated")->delimiter(',');
  sim->add_option("--sigma", sim_sigma, "Noise standard deviation (dB)")->capture_default_str();
  sim->add_option("--iterations", sim_iterations, "Passes through all anchors")->capture_default_str();
  sim->add_option("--seed", sim_seed, "PRNG seed")->capture_default_str();
  sim->add_option("--tunnel", sim_tunnel, "Tunnel id written to the header")->capture_default_str();
  sim->add_option("-o,--output", sim_out, "Output path (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the template model to a campaign CSV");
  std::string fit_in, fit_out, fit_timestamp;
  FitFlags fit_flags;
  fit->add_option("campaign", fit_in, "Campaign CSV ('-' for stdin)")->required();
  fit_flags.add_to(fit);
  fit->add_option("--timestamp", fit_timestamp, "Timestamp recorded in provenance (default: now, UTC)");
  fit->add_option("-o,--output", fit_out, "Output path (default stdout)");

  // convergence
  auto* conv = app.add_subcommand("convergence", "Run the convergence experiment matrix");
  ModelFlags conv_model;
  conv_model.add_to(conv);
  FitFlags conv_fit;
  conv_fit.add_to(conv);
  std::vector<std::string> conv_policies;
  std::vector<std::uint64_t> conv_seeds;
  std::size_t conv_seed_count = 0, conv_iterations = 100;
  std::uint64_t conv_seed_base = 1;
  double conv_bs1 = 0.0, conv_bs2 = 300.0, conv_sigma = 1.25;
  unsigned conv_threads = 0;
  std::string conv_out;
  conv->add_option("--policy", conv_policies, "uniform:<N> or explicit:<x1>,<x2>,... (repeatable)");
  auto* seeds_opt = conv->add_option("--seeds", conv_seeds, "Seed list")->delimiter(',');
  conv->add_option("--seed-count", conv_seed_count, "Use seeds seed-base .. seed-base+count-1")->excludes(seeds_opt);
  conv->add_option("--seed-base", conv_seed_base, "First seed for --seed-count")->capture_default_str();
  conv->add_option("--bs1", conv_bs1, "BS1 position (m)")->capture_default_str();
  conv->add_option("--bs2", conv_bs2, "BS2 position (m)")->capture_default_str();
  conv->add_option("--sigma", conv_sigma, "Noise standard deviation (dB)")->capture_default_str();
  conv->add_option("--iterations", conv_iterations, "Passes per run")->capture_default_str();
  conv->add_option("--threads", conv_threads, "Worker threads (0 = hardware)")->capture_default_str();
  conv->add_option("-o,--output", conv_out, "Output path (default stdout)");

  // locate
  auto* loc = app.add_subcommand("locate", "Position an object from measured losses");
  std::string loc_model, loc_out;
  double loc_bs1 = 0.0, loc_bs2 = 300.0;
  std::optional<double> loc_l1, loc_l2, loc_rssi1, loc_rssi2, loc_tx, loc_gains;
  int loc_direction = 0;
  loc->add_option("--model", loc_model, "Model JSON")->required();
  loc->add_option("--bs1", loc_bs1, "BS1 position (m)")->capture_default_str();
  loc->add_option("--bs2", loc_bs2, "BS2 position (m)")->capture_default_str();
  auto* l1_opt = loc->add_option("--l1", loc_l1, "Path loss at BS1 (dB)");
  auto* l2_opt = loc->add_option("--l2", loc_l2, "Path loss at BS2 (dB)");
  loc->add_option("--rssi1", loc_rssi1, "RSSI at BS1 (dBm)")->excludes(l1_opt);
  loc->add_option("--rssi2", loc_rssi2, "RSSI at BS2 (dBm)")->excludes(l2_opt);
  loc->add_option("--tx-power", loc_tx, "Transmit power (dBm), required with RSSI input");
  loc->add_option("--gains", loc_gains, "Antenna/system gains (dB), required with RSSI input");
  loc->add_option("--direction", loc_direction, "Single-station mode: +1 or -1 along the axis")
      ->check(CLI::IsMember({-1, 1}));
  loc->add_option("-o,--output", loc_out, "Output path (default stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Tabulate a model's path loss curve");
  std::string ev_model, ev_out;
  double ev_start = 1.0, ev_end = 300.0, ev_step = 1.0;
  ev->add_option("--model", ev_model, "Model JSON")->required();
  ev->add_option("--start", ev_start, "First distance (m)")->capture_default_str();
  ev->add_option("--end", ev_end, "Last distance (m)")->capture_default_str();
  ev->add_option("--step", ev_step, "Distance step (m)")->capture_default_str();
  ev->add_option("-o,--output", ev_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::kParse;
  }

  try {
    if (*sim) {
      SimulateConfig cfg;
      cfg.reference = sim_model.build();
      cfg.bs1_pos = sim_bs1;
      cfg.bs2_pos = sim_bs2;
      cfg.placement = placement_from(sim_uniform, sim_anchors);
      cfg.noise_sigma = sim_sigma;
      cfg.iterations = sim_iterations;
      cfg.seed = sim_seed;
      cfg.tunnel_id = sim_tunnel;
      const Campaign c = simulate_campaign(cfg);
      with_output(sim_out, [&](std::ostream& out) { write_campaign(out, c); });
    } else if (*fit) {
      const Campaign c = with_input(fit_in, [](std::istream& in) { return read_campaign(in); });
      FitConfig cfg{fit_flags.build(), fit_in == "-" ? "stdin" : fit_in,
                    fit_timestamp.empty() ? utc_timestamp() : fit_timestamp};
      const ModelFile mf = fit_campaign(c, cfg);
      with_output(fit_out, [&](std::ostream& out) { write_model_file(out, mf); });
    } else if (*conv) {
      ConvergenceConfig cfg;
      cfg.base.reference = conv_model.build();
      cfg.base.geometry = TunnelGeometry(conv_bs1, conv_bs2);
      cfg.base.noise_sigma = conv_sigma;
      cfg.base.iterations = conv_iterations;
      cfg.base.fit = conv_fit.build();
      if (!conv_policies.empty()) {
        cfg.policies.clear();
        for (const auto& p : conv_policies) cfg.policies.push_back(parse_policy(p));
      }
      if (!conv_seeds.empty()) {
        cfg.seeds = conv_seeds;
      } else if (conv_seed_count > 0) {
        cfg.seeds.clear();
        for (std::size_t i = 0; i < conv_seed_count; ++i) cfg.seeds.push_back(conv_seed_base + i);
      }
      cfg.threads = conv_threads;
      const auto traces = run_convergence_matrix(cfg);
      with_output(conv_out, [&](std::ostream& out) { write_trace_csv(out, traces); });
    } else if (*loc) {
      const ModelFile mf = with_input(loc_model, [](std::istream& in) { return read_model_file(in); });
      const TunnelGeometry g(loc_bs1, loc_bs2);
      auto loss_from = [&](const std::optional<double>& loss, const std::optional<double>& rssi,
                           const char* which) -> std::optional<double> {
        if (loss) return loss;
        if (!rssi) return std::nullopt;
        if (!loc_tx || !loc_gains) {
          throw ValidationError(std::string("--rssi") + which + " requires both --tx-power and --gains");
        }
        return path_loss_from_rssi(*rssi, *loc_tx, *loc_gains);
      };
      const auto l1 = loss_from(loc_l1, loc_rssi1, "1");
      const auto l2 = loss_from(loc_l2, loc_rssi2, "2");
      nlohmann::json report;
      if (l1 && l2) {
        if (loc_direction != 0) throw ValidationError("--direction only applies with a single loss");
        report = position_report(locate_two_bs(mf.model, g, *l1, *l2), "two_bs");
      } else if (l1 || l2) {
        const double bs = l1 ? loc_bs1 : loc_bs2;
        const int dir = loc_direction != 0 ? loc_direction : (l1 ? +1 : -1);
        const auto est = locate_one_bs(mf.model, bs, static_cast<Direction>(dir), l1 ? *l1 : *l2,
                                       AxisExtent{loc_bs1, loc_bs2});
        report = position_report(est, l1 ? "single_bs1" : "single_bs2");
      } else {
        throw ValidationError("locate needs --l1/--l2 or --rssi1/--rssi2");
      }
      with_output(loc_out, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
    } else if (*ev) {
      const ModelFile mf = with_input(ev_model, [](std::istream& in) { return read_model_file(in); });
      const auto curve = tabulate_model(mf.model, ev_start, ev_end, ev_step);
      with_output(ev_out, [&](std::ostream& out) { write_curve_csv(out, curve); });
    }
  } catch (const Error& e) {
    std::cerr << error_report(e).dump() << '\n';
    if (e.kind() == ErrorKind::Identifiability) {
      std::cerr << "hint: anchors must cover both the near region (close to a base station) "
                   "and the far region of the path loss curve\n";
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tunnelpl: " << e.what() << '\n';
    return exit_code::kInternal;
  }
  return exit_code::kSuccess;
}
