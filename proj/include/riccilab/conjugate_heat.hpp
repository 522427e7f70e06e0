#pragma once

#include <cstdint>
#include <vector>

#include "riccilab/geometry.hpp"
#include "riccilab/ricci_flow.hpp"

namespace riccilab {

/// v = u^2 at one instant; positive with unit mass against g(t).
struct DensityField {
  ScalarField v;
};

/// Densities aligned with a Trajectory, ordered by increasing t.
struct DensityHistory {
  std::vector<double> times;
  std::vector<DensityField> entries;
  /// Integral of v against g(t_k); diagnostic only, never renormalized.
  std::vector<double> mass;

  std::size_t size() const { return entries.size(); }
};

struct HeatOptions {
  double mass_tolerance = 1e-6;
  double positivity_floor = 1e-10;
};

/// Solves dv/dt = -Lap_g v + R v backward from v(T) = v_T, i.e. the forward
/// heat-type problem dv/dtau = Lap v - R v in tau = T - t, with classical RK4
/// on the trajectory's time grid. Midpoint metrics come from sample().
///
/// Throws Error(PositivityLoss) when min v <= positivity_floor and
/// Error(MassDrift) when |mass - 1| > mass_tolerance at any step.
DensityHistory solve_backward(const Trajectory& traj, const DensityField& v_terminal,
                              const HeatOptions& options = {});

enum class DatumKind { Constant, Bump, RandomSmooth };

struct DatumSpec {
  DatumKind kind = DatumKind::Constant;
  // bump: centre, width of the periodic Gaussian-like profile, amplitude
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 0.5;
  double amplitude = 0.5;
  // random_smooth: seed and maximal wavenumber per axis
  std::uint64_t seed = 1;
  int modes = 2;
};

/// Positive terminal density normalized against m_T. Homogeneous backends only
/// carry constants, so every kind reduces to 1/Vol there.
///
/// Throws Error(NonPositive) when a bump amplitude makes the profile <= 0.
DensityField terminal_datum(const DatumSpec& spec, const MetricState& m_terminal);

double mass(const MetricState& m, const DensityField& density);

struct ChangeOfVariables {
  ScalarField u;  // sqrt(v)
  ScalarField f;  // -ln v, so that u = e^{-f/2}
};

/// Throws Error(PositivityLoss) if some v <= 0.
ChangeOfVariables change_variables(const DensityField& density);

}  // namespace riccilab
