#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "riccilab/conjugate_heat.hpp"
#include "riccilab/errors.hpp"
#include "riccilab/functionals.hpp"
#include "test_support.hpp"

using namespace riccilab;
using namespace riccilab::testing;

namespace {

constexpr double kPi = std::numbers::pi;

// u for u^2 = (1 + 0.5 cos x) / (4 pi^2)
double cos_mode_u(double x, double) { return std::sqrt(1.0 + 0.5 * std::cos(x)) / (2.0 * kPi); }

// Midpoint quadrature of 4 int |u_x|^2 using the analytic derivative.
double cos_mode_f_quadrature(int N) {
  const double h = kTwoPi / N;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = (i + 0.5) * h;
    const double ux = -0.25 * std::sin(x) / std::sqrt(1.0 + 0.5 * std::cos(x)) / (2.0 * kPi);
    sum += ux * ux;
  }
  return 4.0 * sum * h * kTwoPi;
}

// Dense oracle: smallest eigenvalue of (-Lap_0 - Lap_0(phi) / 2) x = lambda e^{2 phi} x.
double dense_lambda0(const MetricState& m) {
  const auto& grid = std::get<ConformalTorus>(m.backend);
  const int N = grid.N;
  const double h2 = grid.spacing() * grid.spacing();
  const auto& phi = m.params;
  const int n = N * N;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  auto id = [N](int i, int j) { return ((j + N) % N) * N + (i + N) % N; };
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const int p = id(i, j);
      const double lap_phi =
          (phi[id(i + 1, j)] + phi[id(i - 1, j)] + phi[id(i, j + 1)] + phi[id(i, j - 1)] - 4.0 * phi[p]) / h2;
      A(p, p) += 4.0 / h2 - 0.5 * lap_phi;
      for (int q : {id(i + 1, j), id(i - 1, j), id(i, j + 1), id(i, j - 1)}) A(p, q) -= 1.0 / h2;
      B(p, p) = std::exp(2.0 * phi[p]);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("F functional examples") {
  const auto flat = torus_metric(16, [](double, double) { return 0.0; });
  CHECK(f_functional(flat, constant_field(flat.backend, 1.0 / kTwoPi)) == 0.0);

  const auto sphere = round_sphere(2, 1.0);
  const double u_sphere = 1.0 / std::sqrt(4.0 * kPi);
  CHECK(f_functional(sphere, constant_field(sphere.backend, u_sphere)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f_functional_f_form(sphere, constant_field(sphere.backend, std::log(4.0 * kPi))) ==
        doctest::Approx(2.0).epsilon(1e-14));

  // Oracle: dense quadrature of the analytic u; the closed form is 1 - sqrt(3)/2.
  const double oracle = cos_mode_f_quadrature(1024);
  CHECK(oracle == doctest::Approx(1.0 - std::sqrt(3.0) / 2.0).epsilon(1e-13));
  double previous = 0.0;
  for (int N : {32, 64, 128, 1024}) {
    const auto m = torus_metric(N, [](double, double) { return 0.0; });
    const double err = std::abs(f_functional(m, torus_field(m, cos_mode_u)) - oracle);
    if (previous > 0.0 && N == 128) CHECK(std::log2(previous / err) > 1.9);
    previous = err;
    if (N == 1024) CHECK(err <= 1e-6);
  }
}

TEST_CASE("F in f-variables agrees to second order") {
  std::vector<double> errors;
  for (int N : {32, 64, 128}) {
    const auto m = torus_metric(N, [](double x, double y) { return 0.1 * std::sin(x) + 0.05 * std::cos(x + 2 * y); });
    DatumSpec spec;
    spec.kind = DatumKind::RandomSmooth;
    spec.seed = 5;
    const auto cv = change_variables(terminal_datum(spec, m));
    errors.push_back(std::abs(f_functional(m, cv.u) - f_functional_f_form(m, cv.f)));
  }
  CHECK(std::log2(errors[0] / errors[1]) > 1.8);
  CHECK(std::log2(errors[1] / errors[2]) > 1.9);
}

TEST_CASE("entropy and omega examples") {
  const auto flat = torus_metric(16, [](double, double) { return 0.0; });
  const auto u_flat = constant_field(flat.backend, 1.0 / kTwoPi);
  CHECK(shannon_entropy(flat, u_flat) == doctest::Approx(-std::log(4.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(-shannon_entropy(flat, u_flat) == doctest::Approx(3.6757).epsilon(1e-4));

  const auto sphere = round_sphere(2, 1.0);
  const auto u_sphere = constant_field(sphere.backend, 1.0 / std::sqrt(4.0 * kPi));
  CHECK(-shannon_entropy(sphere, u_sphere) == doctest::Approx(2.5310).epsilon(1e-4));

  const auto berger = berger_sphere(1.3, 0.7, 1.1);
  const double vol = volume(berger);
  CHECK(-shannon_entropy(berger, constant_field(berger.backend, 1.0 / std::sqrt(vol))) ==
        doctest::Approx(std::log(vol)).epsilon(1e-14));

  CHECK(omega(2.0, 1.0) == 1.5);
  CHECK(omega(2.0, 0.0) == 0.5);
  try {
    omega(0.0, 0.0);
    FAIL("expected NonPositiveOmega");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveOmega);
  }

  for (double c : {0.3, 1.0, 2.5}) {
    const auto s = round_sphere(2, c);
    const auto u = constant_field(s.backend, 1.0 / std::sqrt(volume(s)));
    CHECK(log_entropy(s, u, 0.0, 0.0) == doctest::Approx(std::log(2.0 * kPi)).epsilon(1e-14));
  }
  CHECK(log_entropy(flat, u_flat, 0.5, 0.0) == doctest::Approx(2.9826).epsilon(1e-4));
  CHECK(log_entropy(flat, u_flat, 0.5, 1.0) - log_entropy(flat, u_flat, 0.5, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("lambda0 closed forms") {
  CHECK(std::abs(lambda0(torus_metric(16, [](double, double) { return 0.0; })).value) <= 1e-12);
  CHECK(lambda0(round_sphere(2, 1.0)).value == 0.5);
  CHECK(lambda0(round_sphere(3, 2.0)).value == doctest::Approx(0.75));
  const auto b = berger_sphere(1.5, 1.0, 1.0);
  CHECK(lambda0(b).value == doctest::Approx(scalar_curvature(b).values[0] / 4.0));
}

TEST_CASE("lambda0 matches a dense generalized eigensolve") {
  const auto m = torus_metric(32, [](double x, double) { return 0.1 * std::sin(x); });
  const auto result = lambda0(m);
  const double oracle = dense_lambda0(m);
  CHECK(std::abs(result.value - oracle) <= 1e-8);
  CHECK(integrate(m, ScalarField{[&] {
          auto sq = result.eigenvector.values;
          for (auto& x : sq) x *= x;
          return sq;
        }()}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rayleigh_quotient(m, result.eigenvector) == doctest::Approx(result.value).epsilon(1e-10));

  std::mt19937_64 rng(11);
  const auto rough = torus_metric(16, random_smooth_function(rng, 0.2));
  CHECK(std::abs(lambda0(rough).value - dense_lambda0(rough)) <= 1e-8);
}

TEST_CASE("lambda0 options") {
  const auto m = torus_metric(32, [](double x, double y) { return 0.1 * std::sin(x) * std::cos(y); });
  const auto cold = lambda0(m);
  Lambda0Options warm;
  warm.start = cold.eigenvector;
  const auto hot = lambda0(m, warm);
  CHECK(hot.value == doctest::Approx(cold.value).epsilon(1e-10));
  CHECK(hot.iterations <= cold.iterations);

  Lambda0Options capped;
  capped.max_iterations = 1;
  try {
    lambda0(m, capped);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
  }
}

TEST_CASE("lambda0 is non-decreasing along the flow") {
  const auto m0 = torus_metric(32, [](double x, double) { return 0.1 * std::sin(x); });
  const auto traj = integrate_forward(m0, 0.05, 2e-3);
  double previous = -1e300;
  for (std::size_t k = 0; k < traj.size(); k += 5) {
    const double value = lambda0(traj.states[k]).value;
    CHECK(value >= previous - 1e-10);
    previous = value;
  }
  CHECK(previous > lambda0(m0).value);
}
