#include "tunnelpl/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tunnelpl/errors.hpp"

namespace tunnelpl {

void TrainingSet::add(const AnchorObservation& obs) {
  if (!(obs.distance > 0.0) || !std::isfinite(obs.distance)) {
    throw DomainError("observation distance must be positive and finite");
  }
  if (!std::isfinite(obs.path_loss)) throw DomainError("observation path loss must be finite");

  const Key key{obs.anchor, obs.station};
  auto it = means_.find(key);
  if (it == means_.end()) {
    means_.emplace(key, PointMean{obs.distance, obs.path_loss, 1});
  } else {
    PointMean& m = it->second;
    if (m.distance != obs.distance) {
      throw PreconditionError("anchor " + std::to_string(obs.anchor.value) + " observed at " +
                              std::to_string(obs.distance) + " m, previously at " + std::to_string(m.distance) +
                              " m");
    }
    ++m.count;
    m.mean_loss += (obs.path_loss - m.mean_loss) / static_cast<double>(m.count);
  }
  observations_.push_back(obs);
}

std::vector<MeasurementPoint> TrainingSet::mean_points(std::optional<BaseStation> station) const {
  std::vector<MeasurementPoint> out;
  out.reserve(means_.size());
  for (const auto& [key, m] : means_) {
    if (station && key.second != *station) continue;
    out.push_back({m.distance, m.mean_loss});
  }
  return out;
}

std::vector<MeasurementPoint> TrainingSet::raw_points(std::optional<BaseStation> station) const {
  std::vector<MeasurementPoint> out;
  out.reserve(observations_.size());
  for (const auto& obs : observations_) {
    if (station && obs.station != *station) continue;
    out.push_back({obs.distance, obs.path_loss});
  }
  return out;
}

void record_engagement(TrainingSet& ts, const TunnelGeometry& geometry, std::size_t anchor_index, double l1,
                       double l2, std::size_t iteration) {
  if (!std::isfinite(l1) || !std::isfinite(l2)) {
    throw DomainError("engagement at anchor " + std::to_string(anchor_index) + " has a non-finite loss");
  }
  const auto [d1, d2] = geometry.anchor_distances(anchor_index);
  const AnchorId id{anchor_index};
  ts.add({id, BaseStation::One, d1, l1, iteration});
  ts.add({id, BaseStation::Two, d2, l2, iteration});
}

namespace {

using Design = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

std::size_t count_distinct(std::span<const MeasurementPoint> sorted) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].distance != sorted[i - 1].distance) ++n;
  }
  return n;
}

struct LeastSquares {
  Eigen::VectorXd x;
  double sse;
};

std::optional<LeastSquares> solve_least_squares(const Design& a, const Eigen::VectorXd& b) {
  Eigen::ColPivHouseholderQR<Design> qr(a);
  if (qr.rank() < a.cols()) return std::nullopt;
  Eigen::VectorXd x = qr.solve(b);
  const double sse = (a * x - b).squaredNorm();
  return LeastSquares{std::move(x), sse};
}

// Least-squares fit of a two-column basis over all points; used to check
// whether a single region explains the data as well as two regions do.
double single_region_sse(std::span<const MeasurementPoint> pts, bool log_basis) {
  Design a(static_cast<Eigen::Index>(pts.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = log_basis ? 10.0 * std::log10(pts[i].distance) : pts[i].distance;
    a(r, 1) = 1.0;
    b(r) = pts[i].loss;
  }
  const auto ls = solve_least_squares(a, b);
  return ls ? ls->sse : std::numeric_limits<double>::infinity();
}

std::vector<double> candidate_grid(double lo, double hi, const FitOptions& opt) {
  std::vector<double> grid;
  if (hi < lo) return grid;
  const double res = opt.grid_resolution;
  if ((hi - lo) / res > 1e7) throw PreconditionError("d0 grid would exceed 10^7 candidates; increase the resolution");
  if (opt.d0_hint) {
    const double h = *opt.d0_hint;
    const auto k_lo = static_cast<long long>(std::ceil((lo - h) / res));
    const auto k_hi = static_cast<long long>(std::floor((hi - h) / res));
    for (long long k = k_lo; k <= k_hi; ++k) grid.push_back(h + static_cast<double>(k) * res);
  } else {
    const auto steps = static_cast<long long>(std::floor((hi - lo) / res + 1e-9));
    for (long long k = 0; k <= steps; ++k) grid.push_back(lo + static_cast<double>(k) * res);
  }
  return grid;
}

FitResult make_result(const LinearFit& lin, double d0, std::vector<ProfilePoint> trace) {
  if (!(lin.p1 > 0.0)) {
    throw DegenerateError("fitted path loss exponent is not positive (gamma = " + std::to_string(lin.p1) +
                          "); the constant C cannot be recovered");
  }
  return FitResult{TemplateModel(lin.p1, lin.p2 / lin.p1, d0, lin.p3), std::max(lin.sse, 0.0), lin.near_count,
                   lin.far_count, std::move(trace)};
}

}  // namespace

std::optional<LinearFit> solve_at_break_point(std::span<const MeasurementPoint> sorted, double d0,
                                              bool nonnegative_alpha) {
  if (!(d0 > 0.0)) return std::nullopt;
  const auto split = std::upper_bound(sorted.begin(), sorted.end(), d0,
                                      [](double v, const MeasurementPoint& p) { return v < p.distance; });
  const auto near = sorted.subspan(0, static_cast<std::size_t>(split - sorted.begin()));
  const auto far = sorted.subspan(near.size());
  if (count_distinct(near) < 2 || count_distinct(far) < 2) return std::nullopt;

  const auto n = static_cast<Eigen::Index>(sorted.size());
  const double log_d0 = 10.0 * std::log10(d0);
  Design a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = sorted[static_cast<std::size_t>(i)];
    const bool is_near = static_cast<std::size_t>(i) < near.size();
    a(i, 0) = is_near ? 10.0 * std::log10(p.distance) : log_d0;
    a(i, 1) = 1.0;
    a(i, 2) = is_near ? 0.0 : p.distance - d0;
    b(i) = p.loss;
  }

  auto ls = solve_least_squares(a, b);
  if (!ls) return std::nullopt;
  if (nonnegative_alpha && ls->x(2) < 0.0) {
    // The objective is a convex quadratic, so when the free optimum has
    // alpha < 0 the constrained optimum lies on alpha = 0.
    auto clamped = solve_least_squares(a.leftCols(2), b);
    if (!clamped) return std::nullopt;
    return LinearFit{clamped->x(0), clamped->x(1), 0.0, clamped->sse, near.size(), far.size()};
  }
  return LinearFit{ls->x(0), ls->x(1), ls->x(2), ls->sse, near.size(), far.size()};
}

FitResult fit_template(std::span<const MeasurementPoint> points, const FitOptions& options) {
  if (points.size() < 4) throw PreconditionError("fit_template needs at least 4 points, got " + std::to_string(points.size()));
  if (!(options.grid_resolution > 0.0)) throw PreconditionError("grid resolution must be positive");
  if (!(options.refine_tolerance > 0.0)) throw PreconditionError("refinement tolerance must be positive");
  for (const auto& p : points) {
    if (!(p.distance > 0.0) || !std::isfinite(p.distance)) throw DomainError("fit_template: distances must be positive");
    if (!std::isfinite(p.loss)) throw DomainError("fit_template: losses must be finite");
  }

  std::vector<MeasurementPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const MeasurementPoint& x, const MeasurementPoint& y) {
    return x.distance < y.distance || (x.distance == y.distance && x.loss < y.loss);
  });
  if (count_distinct(pts) < 2) throw PreconditionError("fit_template needs at least 2 distinct distances");

  const std::span<const MeasurementPoint> sorted(pts);
  const bool nonneg = options.nonnegative_alpha;

  if (options.fixed_d0) {
    const double d0 = *options.fixed_d0;
    const auto lin = solve_at_break_point(sorted, d0, nonneg);
    if (!lin) {
      throw IdentifiabilityError("break point " + std::to_string(d0) +
                                 " m leaves fewer than two distinct distances in the near or far region");
    }
    return make_result(*lin, d0, {{d0, lin->sse}});
  }

  const double lo = options.d0_min.value_or(pts.front().distance);
  const double hi = options.d0_max.value_or(pts.back().distance);
  const std::vector<double> grid = candidate_grid(lo, hi, options);

  std::vector<ProfilePoint> trace;
  trace.reserve(grid.size());
  std::optional<LinearFit> best;
  double best_d0 = 0.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto lin = solve_at_break_point(sorted, grid[i], nonneg);
    if (!lin) continue;
    trace.push_back({grid[i], lin->sse});
    // strict comparison keeps the smaller d0 on ties
    if (!best || lin->sse < best->sse) {
      best = lin;
      best_d0 = grid[i];
      best_index = i;
    }
  }
  if (!best) {
    throw IdentifiabilityError(
        "no break point in [" + std::to_string(lo) + ", " + std::to_string(hi) +
        "] m has at least two distinct distances in both the near and the far region; "
        "anchors must cover both sides of the break point");
  }

  // Golden-section refinement inside the neighbouring grid cells.
  double a = best_index > 0 ? grid[best_index - 1] : lo;
  double b = best_index + 1 < grid.size() ? grid[best_index + 1] : hi;
  auto objective = [&](double d0) {
    const auto lin = solve_at_break_point(sorted, d0, nonneg);
    return lin ? lin->sse : std::numeric_limits<double>::infinity();
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > options.refine_tolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
  }
  const double refined_d0 = f1 <= f2 ? x1 : x2;
  if (const auto lin = solve_at_break_point(sorted, refined_d0, nonneg);
      lin && (lin->sse < best->sse || (lin->sse == best->sse && refined_d0 < best_d0))) {
    best = lin;
    best_d0 = refined_d0;
  }

  // Two regions must explain the data strictly better than either region alone.
  if (!(best->sse < single_region_sse(sorted, true))) {
    throw IdentifiabilityError(
        "the near-region log-distance law alone fits the data as well as the two-piece model; "
        "the far region is not observed");
  }
  if (!(best->sse < single_region_sse(sorted, false))) {
    throw IdentifiabilityError(
        "a single straight line fits the data as well as the two-piece model; the near region is not observed");
  }

  return make_result(*best, best_d0, std::move(trace));
}

FitResult fit_from_training_set(const TrainingSet& ts, const FitOptions& options) {
  if (ts.empty()) throw PreconditionError("training set is empty");
  const auto pts = options.samples == SampleMode::Means ? ts.mean_points(options.station) : ts.raw_points(options.station);
  return fit_template(pts, options);
}

Residuals evaluate_residuals(const TemplateModel& model, std::span<const MeasurementPoint> points) {
  Residuals out{0.0, {}};
  out.residuals.reserve(points.size());
  for (const auto& p : points) {
    const double r = path_loss(model, p.distance) - p.loss;
    out.residuals.push_back(r);
    out.sse += r * r;
  }
  return out;
}

}  // namespace tunnelpl
