#pragma once

// Two-piece path-loss template: log-distance near region joined to a linear
// far region at the break point d0.
//
//   L(d) = gamma * (10 log10(d) + c)      d <= d0
//   L(d) = L0 + alpha * (d - d0)          d >  d0
//   L0   = gamma * (10 log10(d0) + c)

#include <cmath>
#include <utility>
#include <vector>

namespace tunnelpl {

class TemplateModel {
 public:
  /// Throws DomainError unless gamma > 0, d0 > 0 and all values are finite.
  TemplateModel(double gamma, double c, double d0, double alpha);

  double gamma() const noexcept { return gamma_; }
  double c() const noexcept { return c_; }
  double d0() const noexcept { return d0_; }
  double alpha() const noexcept { return alpha_; }

  /// Loss at the break point.
  double l0() const noexcept { return gamma_ * (10.0 * std::log10(d0_) + c_); }

  friend bool operator==(const TemplateModel&, const TemplateModel&) = default;

 private:
  double gamma_;
  double c_;
  double d0_;
  double alpha_;
};

/// Reference parameters used throughout the validation scenario.
TemplateModel reference_model();

struct FresnelParams {
  double h_r;     // receiver height, m
  double h_t;     // transmitter height, m
  double lambda;  // carrier wavelength, m
};

/// Tunnel axis with two base stations and the RFID anchor coordinates between them.
class TunnelGeometry {
 public:
  /// Throws ValidationError if bs2 <= bs1, an anchor is not strictly inside
  /// (bs1, bs2), or anchors are not strictly increasing.
  TunnelGeometry(double bs1_pos, double bs2_pos, std::vector<double> anchor_positions = {});

  double bs1_pos() const noexcept { return bs1_; }
  double bs2_pos() const noexcept { return bs2_; }
  double span() const noexcept { return bs2_ - bs1_; }
  const std::vector<double>& anchors() const noexcept { return anchors_; }
  std::size_t anchor_count() const noexcept { return anchors_.size(); }

  /// Distances (to BS1, to BS2) of anchor i. Throws PreconditionError when out of range.
  std::pair<double, double> anchor_distances(std::size_t i) const;

  TunnelGeometry with_anchors(std::vector<double> anchor_positions) const;

 private:
  double bs1_;
  double bs2_;
  std::vector<double> anchors_;
};

double path_loss(const TemplateModel& model, double d);

double fresnel_break_point(const FresnelParams& p);

/// Exact inverse of path_loss. Throws InversionError when the loss lies above
/// L0 and the far region is flat or decreasing.
double invert_distance(const TemplateModel& model, double loss);

struct NormalizedPair {
  double d1;
  double d2;
};

/// Rescales (d1, d2) so that they sum to D while keeping their ratio.
NormalizedPair normalize_pair(double d1, double d2, double span);

}  // namespace tunnelpl
