#include "tunnelpl/model.hpp"

#include <string>

#include "tunnelpl/errors.hpp"

namespace tunnelpl {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::Precondition: return "precondition_error";
    case ErrorKind::Identifiability: return "identifiability_error";
    case ErrorKind::Degenerate: return "degenerate_error";
    case ErrorKind::Inversion: return "inversion_error";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Validation: return "validation_error";
  }
  return "error";
}

TemplateModel::TemplateModel(double gamma, double c, double d0, double alpha)
    : gamma_(gamma), c_(c), d0_(d0), alpha_(alpha) {
  if (!std::isfinite(gamma) || !std::isfinite(c) || !std::isfinite(d0) || !std::isfinite(alpha)) {
    throw DomainError("template model parameters must be finite");
  }
  if (gamma <= 0.0) throw DomainError("path loss exponent gamma must be positive, got " + std::to_string(gamma));
  if (d0 <= 0.0) throw DomainError("break point d0 must be positive, got " + std::to_string(d0));
}

TemplateModel reference_model() { return TemplateModel(2.0, 20.1, 50.0, 0.2); }

TunnelGeometry::TunnelGeometry(double bs1_pos, double bs2_pos, std::vector<double> anchor_positions)
    : bs1_(bs1_pos), bs2_(bs2_pos), anchors_(std::move(anchor_positions)) {
  if (!std::isfinite(bs1_) || !std::isfinite(bs2_) || !(bs2_ > bs1_)) {
    throw ValidationError("base station positions must satisfy bs1_pos < bs2_pos");
  }
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const double x = anchors_[i];
    if (!std::isfinite(x) || !(x > bs1_ && x < bs2_)) {
      throw ValidationError("anchor " + std::to_string(i) + " at " + std::to_string(x) +
                            " m is not strictly between the base stations");
    }
    if (i > 0 && !(x > anchors_[i - 1])) {
      throw ValidationError("anchor positions must be strictly increasing (anchor " + std::to_string(i) + ")");
    }
  }
}

std::pair<double, double> TunnelGeometry::anchor_distances(std::size_t i) const {
  if (i >= anchors_.size()) {
    throw PreconditionError("anchor index " + std::to_string(i) + " out of range (" +
                            std::to_string(anchors_.size()) + " anchors)");
  }
  return {anchors_[i] - bs1_, bs2_ - anchors_[i]};
}

TunnelGeometry TunnelGeometry::with_anchors(std::vector<double> anchor_positions) const {
  return TunnelGeometry(bs1_, bs2_, std::move(anchor_positions));
}

double path_loss(const TemplateModel& model, double d) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive, got " + std::to_string(d));
  if (d <= model.d0()) return model.gamma() * (10.0 * std::log10(d) + model.c());
  return model.l0() + model.alpha() * (d - model.d0());
}

double fresnel_break_point(const FresnelParams& p) {
  if (!(p.lambda > 0.0)) throw DomainError("fresnel_break_point: wavelength must be positive");
  if (p.h_r < 0.0 || p.h_t < 0.0) throw DomainError("fresnel_break_point: antenna heights must be non-negative");
  return 4.0 * p.h_r * p.h_t / p.lambda;
}

double invert_distance(const TemplateModel& model, double loss) {
  if (!std::isfinite(loss)) throw InversionError("invert_distance: loss must be finite");
  const double l0 = model.l0();
  if (loss <= l0) return std::pow(10.0, (loss / model.gamma() - model.c()) / 10.0);
  if (!(model.alpha() > 0.0)) {
    throw InversionError("invert_distance: loss " + std::to_string(loss) + " dB exceeds the break-point loss " +
                         std::to_string(l0) + " dB but the far-region slope is not positive");
  }
  return model.d0() + (loss - l0) / model.alpha();
}

NormalizedPair normalize_pair(double d1, double d2, double span) {
  if (!(span > 0.0)) throw DomainError("normalize_pair: D must be positive");
  if (!(d1 >= 0.0) || !(d2 >= 0.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
    throw DomainError("normalize_pair: distances must be finite and non-negative");
  }
  const double sum = d1 + d2;
  if (sum == 0.0) throw DomainError("normalize_pair: d1 + d2 is zero");
  if (sum == span) return {d1, d2};
  // The smaller share is scaled directly, the larger one takes the remainder,
  // so the pair sums to D.
  if (d1 <= d2) {
    const double n1 = span * (d1 / sum);
    return {n1, span - n1};
  }
  const double n2 = span * (d2 / sum);
  return {span - n2, n2};
}

}  // namespace tunnelpl
