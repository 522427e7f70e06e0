#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace riccilab {

/// Round metric on S^n scaled by a single factor c (g = c * g_round).
struct RoundSphere {
  int n = 2;
};

/// Left-invariant metric on S^3 = SU(2), diagonal (A, B, C) in a Milnor
/// frame X_1, X_2, X_3 with [X_2, X_3] = 2 X_1 (cyclic). A = B = C = c is
/// c times the unit round metric.
struct BergerSphere {};

/// e^{2 phi} times the flat metric on the square torus [0, L)^2, sampled on
/// a uniform N x N periodic grid.
struct ConformalTorus {
  int N = 64;
  double L = 2.0 * std::numbers::pi;

  double spacing() const { return L / N; }
  std::size_t nodes() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(((j % N) + N) % N) * static_cast<std::size_t>(N) +
           static_cast<std::size_t>(((i % N) + N) % N);
  }
};

using BackendId = std::variant<RoundSphere, BergerSphere, ConformalTorus>;

int dimension(const BackendId& backend);
/// Number of spatial nodes; homogeneous backends carry a single value.
std::size_t node_count(const BackendId& backend);
/// Length of the metric parameter vector (c; A,B,C; or phi per node).
std::size_t param_count(const BackendId& backend);
bool is_homogeneous(const BackendId& backend);
/// Throws Error(Config) on n < 2, odd or too small N, or L <= 0.
void validate(const BackendId& backend);

struct MetricState {
  BackendId backend;
  double t = 0.0;
  std::vector<double> params;
};

MetricState round_sphere(int n, double c, double t = 0.0);
MetricState berger_sphere(double a, double b, double c, double t = 0.0);
MetricState conformal_torus(const ConformalTorus& grid, std::vector<double> phi, double t = 0.0);

/// Throws Error(Config) if a parameter violates its invariant.
void validate(const MetricState& m);

struct ScalarField {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

ScalarField constant_field(const BackendId& backend, double value);

/// Torus: coordinate components (T11, T12, T22) interleaved per node.
/// Homogeneous backends: principal values in the orthonormal frame.
struct SymTensorField {
  std::vector<double> data;
};

double unit_sphere_volume(int n);

ScalarField scalar_curvature(const MetricState& m);
SymTensorField ricci(const MetricState& m);
SymTensorField metric_tensor(const MetricState& m);
ScalarField laplace_beltrami(const MetricState& m, const ScalarField& w);
ScalarField gradient_sq(const MetricState& m, const ScalarField& w);
/// <grad w, grad z>_g with the same stencil as gradient_sq.
ScalarField gradient_inner(const MetricState& m, const ScalarField& w, const ScalarField& z);
/// grad w (x) grad w; its g-trace reproduces gradient_sq exactly.
SymTensorField gradient_outer(const MetricState& m, const ScalarField& w);
SymTensorField hessian(const MetricState& m, const ScalarField& w);
double integrate(const MetricState& m, const ScalarField& w);
double volume(const MetricState& m);
ScalarField tensor_norm_sq(const MetricState& m, const SymTensorField& T);
ScalarField trace(const MetricState& m, const SymTensorField& T);

/// Ricci flow velocity dg/dt = -2 Ric written in backend parameters.
std::vector<double> ricci_flow_rhs(const MetricState& m);

namespace torus {

/// Flat 5-point Laplacian on the periodic grid.
std::vector<double> flat_laplacian(const ConformalTorus& grid, std::span<const double> w);

}  // namespace torus

}  // namespace riccilab
