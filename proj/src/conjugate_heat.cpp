#include "riccilab/conjugate_heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "riccilab/errors.hpp"

namespace riccilab {

namespace {

// d v / d tau = Lap_g v - R v at the metric m.
std::vector<double> heat_rhs(const MetricState& m, const ScalarField& R, const std::vector<double>& v) {
  ScalarField field{v};
  auto lap = laplace_beltrami(m, field);
  for (std::size_t k = 0; k < v.size(); ++k) lap[k] -= R[k] * v[k];
  return std::move(lap.values);
}

std::vector<double> shifted(const std::vector<double>& v, double scale, const std::vector<double>& dir) {
  std::vector<double> out(v);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += scale * dir[k];
  return out;
}

void check_density(const MetricState& m, const ScalarField& v, double m_value, const HeatOptions& options) {
  const double lowest = *std::min_element(v.values.begin(), v.values.end());
  if (!(lowest > options.positivity_floor)) {
    throw Error(ErrorKind::PositivityLoss,
                "min v = " + std::to_string(lowest) + " at t = " + std::to_string(m.t));
  }
  if (!(std::abs(m_value - 1.0) <= options.mass_tolerance)) {
    throw Error(ErrorKind::MassDrift, "|mass - 1| = " + std::to_string(std::abs(m_value - 1.0)) +
                                          " at t = " + std::to_string(m.t));
  }
}

// Uniform in [-1, 1) from raw 64-bit output, independent of the standard
// library's distribution implementations.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

DensityField normalized(const MetricState& m, std::vector<double> values) {
  DensityField d{ScalarField{std::move(values)}};
  const double total = integrate(m, d.v);
  for (auto& x : d.v.values) x /= total;
  return d;
}

}  // namespace

double mass(const MetricState& m, const DensityField& density) { return integrate(m, density.v); }

DensityHistory solve_backward(const Trajectory& traj, const DensityField& v_terminal, const HeatOptions& options) {
  const std::size_t count = traj.size();
  if (count == 0) throw Error(ErrorKind::Config, "empty trajectory");
  if (v_terminal.v.size() != node_count(traj.backend)) {
    throw Error(ErrorKind::Config, "terminal density does not match the trajectory backend");
  }

  DensityHistory hist;
  hist.times = traj.times;
  hist.entries.resize(count);
  hist.mass.resize(count);

  const std::size_t last = count - 1;
  hist.entries[last] = v_terminal;
  hist.mass[last] = mass(traj.states[last], v_terminal);
  check_density(traj.states[last], v_terminal.v, hist.mass[last], options);

  const double dt = traj.dt;
  ScalarField R_upper = scalar_curvature(traj.states[last]);
  for (std::size_t k = last; k > 0; --k) {
    const MetricState& upper = traj.states[k];
    const MetricState& lower = traj.states[k - 1];
    const MetricState middle = sample(traj, 0.5 * (traj.times[k] + traj.times[k - 1]));
    const ScalarField R_middle = scalar_curvature(middle);
    ScalarField R_lower = scalar_curvature(lower);

    const auto& v = hist.entries[k].v.values;
    const auto k1 = heat_rhs(upper, R_upper, v);
    const auto k2 = heat_rhs(middle, R_middle, shifted(v, 0.5 * dt, k1));
    const auto k3 = heat_rhs(middle, R_middle, shifted(v, 0.5 * dt, k2));
    const auto k4 = heat_rhs(lower, R_lower, shifted(v, dt, k3));

    std::vector<double> next(v);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    hist.entries[k - 1] = DensityField{ScalarField{std::move(next)}};
    hist.mass[k - 1] = mass(lower, hist.entries[k - 1]);
    check_density(lower, hist.entries[k - 1].v, hist.mass[k - 1], options);
    R_upper = std::move(R_lower);
  }
  return hist;
}

DensityField terminal_datum(const DatumSpec& spec, const MetricState& m_terminal) {
  validate(m_terminal);
  const auto* grid = std::get_if<ConformalTorus>(&m_terminal.backend);
  if (spec.kind == DatumKind::Bump && spec.amplitude <= -1.0) {
    throw Error(ErrorKind::NonPositive, "bump amplitude <= -1 makes the density non-positive");
  }
  if (!grid || spec.kind == DatumKind::Constant) {
    return normalized(m_terminal, std::vector<double>(node_count(m_terminal.backend), 1.0));
  }

  const int N = grid->N;
  const double wave = 2.0 * std::numbers::pi / grid->L;
  const double h = grid->spacing();
  std::vector<double> values(grid->nodes());

  if (spec.kind == DatumKind::Bump) {
    const double inv_w2 = 1.0 / (spec.width * spec.width);
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < N; ++i) {
        const double x = i * h, y = j * h;
        const double profile =
            std::exp((std::cos(wave * (x - spec.center_x)) + std::cos(wave * (y - spec.center_y)) - 2.0) * inv_w2);
        values[grid->index(i, j)] = 1.0 + spec.amplitude * profile;
      }
    }
    if (*std::min_element(values.begin(), values.end()) <= 0.0) {
      throw Error(ErrorKind::NonPositive, "bump profile is non-positive");
    }
    return normalized(m_terminal, std::move(values));
  }

  // Random smooth: exp of a truncated Fourier series over the half plane of
  // wavenumbers with |k_x|, |k_y| <= modes, coefficients damped by 1/(1+|k|^2).
  struct Mode {
    int kx, ky;
    double a, b;
  };
  std::mt19937_64 rng(spec.seed);
  std::vector<Mode> modes;
  for (int kx = 0; kx <= spec.modes; ++kx) {
    for (int ky = -spec.modes; ky <= spec.modes; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double damp = 1.0 / (1.0 + kx * kx + ky * ky);
      const double a = symmetric_unit(rng) * damp;
      const double b = symmetric_unit(rng) * damp;
      modes.push_back({kx, ky, a, b});
    }
  }
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double x = i * h, y = j * h;
      double s = 0.0;
      for (const auto& md : modes) {
        const double arg = wave * (md.kx * x + md.ky * y);
        s += md.a * std::cos(arg) + md.b * std::sin(arg);
      }
      values[grid->index(i, j)] = std::exp(spec.amplitude * s);
    }
  }
  return normalized(m_terminal, std::move(values));
}

ChangeOfVariables change_variables(const DensityField& density) {
  ChangeOfVariables out{ScalarField{std::vector<double>(density.v.size())},
                        ScalarField{std::vector<double>(density.v.size())}};
  for (std::size_t k = 0; k < density.v.size(); ++k) {
    const double v = density.v[k];
    if (!(v > 0.0)) throw Error(ErrorKind::PositivityLoss, "change of variables needs v > 0");
    out.u[k] = std::sqrt(v);
    out.f[k] = -std::log(v);
  }
  return out;
}

}  // namespace riccilab
