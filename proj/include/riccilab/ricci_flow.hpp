#pragma once

#include <cstddef>
#include <vector>

#include "riccilab/geometry.hpp"

namespace riccilab {

/// Metrics on a uniform time grid t_0 < ... < t_K produced by forward Ricci
/// flow. Immutable once built.
struct Trajectory {
  BackendId backend;
  std::vector<double> times;
  std::vector<MetricState> states;
  double dt = 0.0;

  std::size_t size() const { return states.size(); }
  double start() const { return times.front(); }
  double end() const { return times.back(); }
};

/// Parameters below this value (or e^{2 phi} below it on the torus) count as
/// a singularity.
inline constexpr double kBlowUpFloor = 1e-6;

/// Explicit parabolic step bound: safety * h^2 min(e^{2 phi}) / 8 on the
/// torus, safety * min(parameter) / 8 on homogeneous backends.
double stability_dt(const MetricState& m, double safety = 1.0);

/// Classical RK4 with fixed step. The number of steps is round(horizon / dt)
/// and t_k = t_0 + k dt.
///
/// Throws Error(StepTooLarge) if dt exceeds stability_dt at any state and
/// Error(BlowUp) if a parameter leaves the admissible range.
Trajectory integrate_forward(const MetricState& m0, double horizon, double dt);

/// Cubic Hermite interpolation of the parameters between bracketing
/// snapshots, using the flow velocity at both ends (O(dt^4); exact at grid
/// times and for parameters linear in t). Throws Error(OutOfRange) outside [t_0, t_K].
MetricState sample(const Trajectory& traj, double t);

}  // namespace riccilab
