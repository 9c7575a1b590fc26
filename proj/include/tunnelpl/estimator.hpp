#pragma once

// Least-squares estimation of the template model from anchor observations.
//
// For a fixed break point d0 the model is linear in (gamma, gamma*c, alpha):
//   near rows (d <= d0): [10 log10 d,  1, 0     ]
//   far rows  (d >  d0): [10 log10 d0, 1, d - d0]
// so the fit profiles d0 over a grid, solves each linear subproblem by QR,
// and polishes the best grid cell with a golden-section search.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tunnelpl/model.hpp"

namespace tunnelpl {

struct AnchorId {
  std::size_t value = 0;
  friend auto operator<=>(const AnchorId&, const AnchorId&) = default;
};

enum class BaseStation { One = 1, Two = 2 };

struct AnchorObservation {
  AnchorId anchor;
  BaseStation station = BaseStation::One;
  double distance = 0.0;   // m
  double path_loss = 0.0;  // dB
  std::size_t iteration = 0;
};

struct MeasurementPoint {
  double distance;  // m
  double loss;      // dB
  friend bool operator==(const MeasurementPoint&, const MeasurementPoint&) = default;
};

struct PointMean {
  double distance = 0.0;
  double mean_loss = 0.0;
  std::size_t count = 0;
};

/// Append-only store of observations with a running mean per (anchor, station).
class TrainingSet {
 public:
  using Key = std::pair<AnchorId, BaseStation>;

  /// Throws DomainError for a non-positive distance or non-finite loss, and
  /// PreconditionError when the key was previously seen at another distance.
  void add(const AnchorObservation& obs);

  bool empty() const noexcept { return observations_.empty(); }
  const std::vector<AnchorObservation>& observations() const noexcept { return observations_; }
  const std::map<Key, PointMean>& means() const noexcept { return means_; }

  /// One point per key; optionally restricted to one station.
  std::vector<MeasurementPoint> mean_points(std::optional<BaseStation> station = {}) const;
  /// Every stored sample; optionally restricted to one station.
  std::vector<MeasurementPoint> raw_points(std::optional<BaseStation> station = {}) const;

 private:
  std::vector<AnchorObservation> observations_;
  std::map<Key, PointMean> means_;
};

/// Appends the pair of observations produced when an object passes anchor
/// `anchor_index`: (anchor - bs1, l1) for BS1 and (bs2 - anchor, l2) for BS2.
void record_engagement(TrainingSet& ts, const TunnelGeometry& geometry, std::size_t anchor_index, double l1,
                       double l2, std::size_t iteration);

enum class SampleMode { Means, Raw };

struct FitOptions {
  double grid_resolution = 0.5;    // m
  double refine_tolerance = 1e-4;  // m
  std::optional<double> d0_min;    // grid range, defaults to the observed distance range
  std::optional<double> d0_max;
  std::optional<double> d0_hint;   // grid is aligned so this value is a candidate
  std::optional<double> fixed_d0;  // skip the search and fit at this break point
  bool nonnegative_alpha = false;
  SampleMode samples = SampleMode::Means;
  std::optional<BaseStation> station;  // unset: pool both stations
};

struct ProfilePoint {
  double d0;
  double sse;
};

struct FitResult {
  TemplateModel model;
  double sse;  // dB^2
  std::size_t near_count;
  std::size_t far_count;
  std::vector<ProfilePoint> d0_trace;
};

/// Solution of the linear subproblem at a fixed break point.
struct LinearFit {
  double p1;  // gamma
  double p2;  // gamma * c
  double p3;  // alpha
  double sse;
  std::size_t near_count;
  std::size_t far_count;
};

/// Solves the linear subproblem for `points` sorted by distance. Returns
/// nullopt when the break point is not admissible: fewer than two distinct
/// distances on either side, or a rank-deficient design.
std::optional<LinearFit> solve_at_break_point(std::span<const MeasurementPoint> sorted_points, double d0,
                                              bool nonnegative_alpha = false);

FitResult fit_template(std::span<const MeasurementPoint> points, const FitOptions& options = {});

FitResult fit_from_training_set(const TrainingSet& ts, const FitOptions& options = {});

struct Residuals {
  double sse;
  std::vector<double> residuals;  // model - measured, dB
};

Residuals evaluate_residuals(const TemplateModel& model, std::span<const MeasurementPoint> points);

}  // namespace tunnelpl
