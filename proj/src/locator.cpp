#include "tunnelpl/locator.hpp"

#include <cmath>

#include "tunnelpl/errors.hpp"
#include "tunnelpl/format.hpp"

namespace tunnelpl {

PositionEstimate locate_two_bs(const TemplateModel& model, const TunnelGeometry& geometry, double l1, double l2) {
  if (!std::isfinite(l1) || !std::isfinite(l2)) throw InversionError("locate_two_bs: losses must be finite");
  const double span = geometry.span();
  const double d1 = invert_distance(model, l1);
  const double d2 = invert_distance(model, l2);

  PositionEstimate est{0.0, d1, d2, d1, d2, true, {}};
  if (d1 > span) est.warnings.push_back("d1 " + format_double(d1) + " m exceeds the base station spacing");
  if (d2 > span) est.warnings.push_back("d2 " + format_double(d2) + " m exceeds the base station spacing");

  const NormalizedPair n = normalize_pair(d1, d2, span);
  est.d1 = n.d1;
  est.d2 = n.d2;
  est.position = geometry.bs1_pos() + n.d1;
  return est;
}

PositionEstimate locate_one_bs(const TemplateModel& model, double bs_pos, Direction direction, double l,
                               std::optional<AxisExtent> extent) {
  if (!std::isfinite(l)) throw InversionError("locate_one_bs: loss must be finite");
  const double d = invert_distance(model, l);
  PositionEstimate est{bs_pos + static_cast<int>(direction) * d, d, std::nullopt, d, std::nullopt, false, {}};
  if (extent && (est.position < extent->lower || est.position > extent->upper)) {
    est.warnings.push_back("position " + format_double(est.position) + " m lies outside [" +
                           format_double(extent->lower) + ", " + format_double(extent->upper) + "]");
  }
  return est;
}

double path_loss_from_rssi(double rssi_dbm, double tx_power_dbm, double gains_db) {
  if (!std::isfinite(rssi_dbm) || !std::isfinite(tx_power_dbm) || !std::isfinite(gains_db)) {
    throw DomainError("path_loss_from_rssi: inputs must be finite");
  }
  return tx_power_dbm + gains_db - rssi_dbm;
}

}  // namespace tunnelpl
