#include "tunnelpl/trace_io.hpp"

#include <cmath>
#include <ostream>

#include "tunnelpl/errors.hpp"
#include "tunnelpl/format.hpp"

namespace tunnelpl {

void write_trace_csv(std::ostream& out, std::span<const ConvergenceTrace> traces) {
  out << kTraceColumns << '\n';
  for (const auto& tr : traces) {
    for (const auto& e : tr.per_iteration) {
      out << tr.policy << ',' << tr.seed << ',' << e.iteration << ',';
      if (e.effective) {
        out << format_double(e.effective->gamma()) << ',' << format_double(e.effective->c()) << ','
            << format_double(e.effective->d0()) << ',' << format_double(e.effective->alpha()) << ',';
      } else {
        out << ",,,,";
      }
      if (e.failure) {
        out << ',' << to_string(*e.failure) << '\n';
      } else {
        out << format_double(e.sse) << ",ok\n";
      }
    }
  }
}

std::vector<MeasurementPoint> tabulate_model(const TemplateModel& model, double start, double end, double step) {
  if (!(start > 0.0) || !(end >= start) || !std::isfinite(end)) {
    throw DomainError("curve range must satisfy 0 < start <= end");
  }
  if (!(step > 0.0)) throw DomainError("curve step must be positive");
  const auto steps = static_cast<long long>(std::floor((end - start) / step + 1e-9));
  if (steps > 10'000'000) throw DomainError("curve would exceed 10^7 rows");
  std::vector<MeasurementPoint> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long long k = 0; k <= steps; ++k) {
    const double d = start + static_cast<double>(k) * step;
    out.push_back({d, path_loss(model, d)});
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const MeasurementPoint> curve) {
  out << "distance_m,loss_db\n";
  for (const auto& p : curve) out << format_double(p.distance) << ',' << format_double(p.loss) << '\n';
}

}  // namespace tunnelpl
