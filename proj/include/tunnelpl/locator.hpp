#pragma once

// Operating phase: losses measured at the base stations are inverted through
// a fitted model and, with two stations, rescaled to the known spacing D.

#include <optional>
#include <string>
#include <vector>

#include "tunnelpl/model.hpp"

namespace tunnelpl {

struct PositionEstimate {
  double position;             // m, tunnel axis
  double d1_raw;               // inverted distance to BS1 (or to the single BS)
  std::optional<double> d2_raw;
  double d1;                   // normalized when `normalized`
  std::optional<double> d2;
  bool normalized;
  std::vector<std::string> warnings;
};

/// Two-station fix. Throws InversionError for non-finite losses or losses the
/// model cannot invert.
PositionEstimate locate_two_bs(const TemplateModel& model, const TunnelGeometry& geometry, double l1, double l2);

enum class Direction : int { TowardLower = -1, TowardHigher = +1 };

struct AxisExtent {
  double lower;
  double upper;
};

/// Single-station fix at bs_pos + direction * d. When `extent` is given, an
/// estimate outside it is returned with a range warning, not clamped.
PositionEstimate locate_one_bs(const TemplateModel& model, double bs_pos, Direction direction, double l,
                               std::optional<AxisExtent> extent = std::nullopt);

/// Link budget: loss = tx_power + gains - rssi.
double path_loss_from_rssi(double rssi_dbm, double tx_power_dbm, double gains_db);

}  // namespace tunnelpl
