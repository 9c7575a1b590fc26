#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tunnelpl/estimator.hpp"
#include "tunnelpl/simulator.hpp"

namespace tunnelpl {

inline constexpr const char* kTraceColumns = "policy,seed,iteration,gamma,c,d0,alpha,sse,status";

/// One row per (policy, seed, iteration) in the order given. Failed
/// iterations report the carried-forward model, an empty sse and the error
/// kind in `status`.
void write_trace_csv(std::ostream& out, std::span<const ConvergenceTrace> traces);

/// distance_m,loss_db rows for start, start + step, ... <= end.
std::vector<MeasurementPoint> tabulate_model(const TemplateModel& model, double start, double end, double step);
void write_curve_csv(std::ostream& out, std::span<const MeasurementPoint> curve);

}  // namespace tunnelpl
