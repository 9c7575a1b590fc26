#pragma once

// Measurement-campaign CSV:
//
//   # tunnel=<id>
//   # bs1_pos=<m>
//   # bs2_pos=<m>
//   # units=m
//   anchor_pos,loss_bs1,loss_bs2,iteration
//   15,63.72,120.2,1
//
// Other "# key=value" lines are kept as free metadata. Distances are never
// stored; they follow from the header and the anchor_pos column.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tunnelpl/estimator.hpp"
#include "tunnelpl/model.hpp"

namespace tunnelpl {

struct CampaignRow {
  double anchor_pos;
  double loss_bs1;
  double loss_bs2;
  std::size_t iteration;
  friend bool operator==(const CampaignRow&, const CampaignRow&) = default;
};

struct Campaign {
  std::string tunnel_id;
  double bs1_pos = 0.0;
  double bs2_pos = 0.0;
  std::string units = "m";
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<CampaignRow> rows;

  /// Throws ValidationError naming the offending row.
  void validate() const;
};

inline constexpr const char* kCampaignColumns = "anchor_pos,loss_bs1,loss_bs2,iteration";

/// Throws ParseError (with line and column) or ValidationError.
Campaign read_campaign(std::istream& in);
void write_campaign(std::ostream& out, const Campaign& campaign);

/// Geometry with one anchor per distinct anchor_pos, in increasing order.
TunnelGeometry campaign_geometry(const Campaign& campaign);

/// Replays every row as an engagement; anchor ids follow campaign_geometry order.
TrainingSet campaign_training_set(const Campaign& campaign);

}  // namespace tunnelpl
