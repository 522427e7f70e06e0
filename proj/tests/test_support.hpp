#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "riccilab/geometry.hpp"

namespace riccilab::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Samples f(x, y) on the nodes of an N x N grid over [0, L)^2.
inline std::vector<double> grid_values(const ConformalTorus& grid, const std::function<double(double, double)>& f) {
  std::vector<double> out(grid.nodes());
  const double h = grid.spacing();
  for (int j = 0; j < grid.N; ++j) {
    for (int i = 0; i < grid.N; ++i) out[grid.index(i, j)] = f(i * h, j * h);
  }
  return out;
}

inline MetricState torus_metric(int N, const std::function<double(double, double)>& phi) {
  const ConformalTorus grid{N, kTwoPi};
  return conformal_torus(grid, grid_values(grid, phi));
}

inline ScalarField torus_field(const MetricState& m, const std::function<double(double, double)>& f) {
  return ScalarField{grid_values(std::get<ConformalTorus>(m.backend), f)};
}

// Smooth random trigonometric field with a handful of low modes.
inline std::function<double(double, double)> random_smooth_function(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::array<double, 4>> terms;
  for (int kx = 0; kx <= 2; ++kx) {
    for (int ky = -2; ky <= 2; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      terms.push_back({double(kx), double(ky), amplitude * coef(rng), amplitude * coef(rng)});
    }
  }
  return [terms](double x, double y) {
    double s = 0.0;
    for (const auto& t : terms) s += t[2] * std::cos(t[0] * x + t[1] * y) + t[3] * std::sin(t[0] * x + t[1] * y);
    return s;
  };
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace riccilab::testing
