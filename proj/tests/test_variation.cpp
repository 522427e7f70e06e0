#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "riccilab/errors.hpp"
#include "riccilab/variation.hpp"
#include "test_support.hpp"

using namespace riccilab;
using namespace riccilab::testing;

namespace {

ScalarField unit_mass_constant(const MetricState& m) {
  return constant_field(m.backend, 1.0 / std::sqrt(volume(m)));
}

ScalarField random_density_u(const MetricState& m, std::uint64_t seed) {
  DatumSpec spec;
  spec.kind = DatumKind::RandomSmooth;
  spec.seed = seed;
  return change_variables(terminal_datum(spec, m)).u;
}

std::vector<EntropyRecord> records_from(std::span<const RowEvaluation> rows) {
  std::vector<EntropyRecord> out;
  for (const auto& r : rows) {
    EntropyRecord rec{r.t, r.F, r.S, 0.0, {}};
    for (std::size_t i = 0; i < r.a.size(); ++i) {
      AdjustedEntry e;
      e.a = r.a[i];
      e.Y = r.Y[i];
      e.omega = r.omega[i];
      e.rhs_theorem = r.rhs_theorem[i];
      e.rhs_ye = r.rhs_ye[i];
      rec.adjusted.push_back(e);
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace

TEST_CASE("matrix quantity examples") {
  const auto sphere = round_sphere(2, 1.0);
  const auto q = matrix_quantity(sphere, unit_mass_constant(sphere));
  const auto g = metric_tensor(sphere);
  REQUIRE(q.data.size() == g.data.size());
  for (std::size_t k = 0; k < q.data.size(); ++k) CHECK(q.data[k] == doctest::Approx(g.data[k]).epsilon(1e-15));

  const auto flat = torus_metric(16, [](double, double) { return 0.0; });
  for (double x : matrix_quantity(flat, constant_field(flat.backend, 0.3)).data) CHECK(x == 0.0);

  // trace Q = R - 2 Lap u / u + 2 |grad u|^2 / u^2
  const auto m = torus_metric(32, [](double x, double y) { return 0.1 * std::sin(x + y); });
  const auto u = random_density_u(m, 3);
  const auto tr = trace(m, matrix_quantity(m, u));
  const auto R = scalar_curvature(m);
  const auto lap = laplace_beltrami(m, u);
  const auto grad = gradient_sq(m, u);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = u.values[k];
    CHECK(tr.values[k] == doctest::Approx(R.values[k] - 2.0 * lap.values[k] / uk + 2.0 * grad.values[k] / (uk * uk)).epsilon(1e-12));
  }

  DensityField bad{constant_field(m.backend, 1.0)};
  bad.v.values[0] = -1.0;
  CHECK_THROWS_AS(matrix_quantity(m, bad.v), Error);
}

TEST_CASE("u-form and f-form differ only by stencil error") {
  const auto u_of = [](double x, double) { return std::sqrt(1.0 + 0.5 * std::cos(x)) / kTwoPi; };
  std::vector<double> errors;
  for (int N : {32, 64, 128}) {
    const auto m = torus_metric(N, [](double, double) { return 0.0; });
    const auto u = torus_field(m, u_of);
    ScalarField f = u;
    for (auto& x : f.values) x = -2.0 * std::log(x);
    const auto qu = matrix_quantity(m, u);
    const auto qf = matrix_quantity_f_form(m, f);
    double e = 0.0;
    for (std::size_t k = 0; k < qu.data.size(); ++k) e = std::max(e, std::abs(qu.data[k] - qf.data[k]));
    errors.push_back(e);
  }
  CHECK(std::log2(errors[0] / errors[1]) > 1.9);
  CHECK(std::log2(errors[1] / errors[2]) > 1.9);

  // Homogeneous backends carry no stencil, so the forms coincide.
  const auto b = berger_sphere(1.2, 1.0, 0.8);
  const auto qb = matrix_quantity(b, unit_mass_constant(b));
  const auto qbf = matrix_quantity_f_form(b, constant_field(b.backend, std::log(volume(b))));
  for (std::size_t k = 0; k < qb.data.size(); ++k) CHECK(qb.data[k] == doctest::Approx(qbf.data[k]).epsilon(1e-14));
}

TEST_CASE("right-hand side examples") {
  const auto sphere = round_sphere(2, 1.0);
  const auto us = unit_mass_constant(sphere);
  CHECK(std::abs(rhs_theorem(sphere, us, 0.0)) <= 1e-14);
  CHECK(std::abs(rhs_ye(sphere, us, 0.0)) <= 1e-14);
  CHECK(rhs_theorem(sphere, us, 1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(rhs_ye(sphere, us, 1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));

  const auto flat = torus_metric(16, [](double, double) { return 0.0; });
  const auto uf = unit_mass_constant(flat);
  CHECK(rhs_theorem(flat, uf, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rhs_ye(flat, uf, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  for (double a : {0.25, 1.0, 3.0}) {
    CHECK(rhs_theorem(flat, uf, a) == doctest::Approx(4.0 * a).epsilon(1e-14));
    CHECK(rhs_ye(flat, uf, a) == doctest::Approx(4.0 * a).epsilon(1e-14));
  }
}

TEST_CASE("both right-hand sides agree on random unit-mass densities") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    std::mt19937_64 rng(seed);
    const auto m = torus_metric(32, random_smooth_function(rng, 0.1));
    const auto u = random_density_u(m, seed + 10);
    for (double a : {0.05, 0.5, 2.0}) {
      const double thm = rhs_theorem(m, u, a);
      const double ye = rhs_ye(m, u, a);
      const double w = omega(f_functional(m, u), a);
      CHECK(std::abs(thm - ye) <= 1e-10 * std::max(1.0, std::abs(thm)));
      CHECK(thm >= 4.0 * a * a / w);
    }
    const double as[] = {0.5};
    const auto row = evaluate_row(m, DensityField{[&] {
                                    auto v = u;
                                    for (auto& x : v.values) x *= x;
                                    return v;
                                  }()},
                                  as);
    CHECK(row.mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(row.laplacian_f_moment == doctest::Approx(row.gradient_f_moment).epsilon(1e-10));
    CHECK(row.rhs_theorem[0] == doctest::Approx(rhs_theorem(m, u, 0.5)).epsilon(1e-13));
    CHECK(row.F == doctest::Approx(f_functional(m, u)).epsilon(1e-14));
  }
}

TEST_CASE("finite-difference time derivative") {
  std::vector<double> quad;
  for (int k = 0; k <= 20; ++k) quad.push_back(std::pow(0.1 * k, 2));
  const auto dq = fd_time_derivative(quad, 0.1);
  CHECK(dq.values[10] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_FALSE(dq.endpoint[10]);
  for (int k : {0, 1, 2, 18, 19, 20}) CHECK(dq.endpoint[k]);
  for (int k = 3; k <= 17; ++k) CHECK_FALSE(dq.endpoint[k]);
  for (int k = 0; k <= 20; ++k) CHECK(dq.values[k] == doctest::Approx(0.2 * k).epsilon(1e-12));

  const std::vector<double> flat(7, 3.25);
  for (double v : fd_time_derivative(flat, 0.5).values) CHECK(v == 0.0);

  std::vector<double> wave;
  for (int k = -10; k <= 10; ++k) wave.push_back(std::sin(1e-3 * k));
  CHECK(std::abs(fd_time_derivative(wave, 1e-3).values[10] - 1.0) <= 1e-6);

  // Sextics are differentiated exactly, shifted windows included.
  std::vector<double> sextic;
  for (int k = 0; k <= 10; ++k) sextic.push_back(std::pow(0.2 * k, 6) - std::pow(0.2 * k, 3));
  const auto d6 = fd_time_derivative(sextic, 0.2);
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.2 * k;
    CHECK(d6.values[k] == doctest::Approx(6 * std::pow(t, 5) - 3 * t * t).epsilon(1e-11));
  }

  // Short series fall back to every available sample.
  const std::vector<double> three{0.0, 0.01, 0.04};
  const auto d3 = fd_time_derivative(three, 0.1);
  CHECK(d3.values[1] == doctest::Approx(0.2));
  CHECK_FALSE(d3.endpoint[1]);
  CHECK(d3.endpoint[0]);

  const std::vector<double> two{1.0, 2.0};
  try {
    fd_time_derivative(two, 0.1);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewSamples);
  }
}

TEST_CASE("proof chain on the shrinking sphere") {
  const auto traj = integrate_forward(round_sphere(2, 1.0), 0.4, 1e-3);
  const auto hist = solve_backward(traj, terminal_datum(DatumSpec{}, traj.states.back()));
  const auto chain = proof_chain_check(traj, hist);
  REQUIRE(chain.size() == traj.size());
  int interior = 0;
  for (const auto& row : chain) {
    const double c = 1.0 - 2.0 * row.t;
    CHECK(row.F == doctest::Approx(2.0 / c).epsilon(1e-9));
    CHECK(row.mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.laplacian_f_moment == 0.0);
    CHECK(row.gradient_f_moment == 0.0);
    if (row.endpoint) continue;
    ++interior;
    CHECK(std::abs(row.dS_dt_fd - 2.0 / c) <= 1e-6);
    CHECK(std::abs(row.dF_dt_fd - 4.0 / (c * c)) <= 1e-6);
    CHECK(std::abs(row.dF_rhs - 4.0 / (c * c)) <= 1e-9);
    CHECK(std::abs(row.residual_S) <= 1e-6);
    CHECK(std::abs(row.residual_F) <= 1e-6);
  }
  CHECK(interior == static_cast<int>(chain.size()) - 6);
  // At c = 1 the closed forms are F = 2 and dF/dt = 4.
  CHECK(chain[2].t == doctest::Approx(2e-3));
}

TEST_CASE("proof chain on the flat torus is stationary") {
  const auto m0 = torus_metric(16, [](double, double) { return 0.0; });
  const auto traj = integrate_forward(m0, 0.02, 1e-3);
  const auto hist = solve_backward(traj, terminal_datum(DatumSpec{}, traj.states.back()));
  for (const auto& row : proof_chain_check(traj, hist)) {
    CHECK(std::abs(row.dS_dt_fd) <= 1e-10);
    CHECK(std::abs(row.F) <= 1e-14);
    CHECK(std::abs(row.dF_rhs) <= 1e-14);
  }
}

TEST_CASE("equivalence and monotonicity flags") {
  const auto traj = integrate_forward(berger_sphere(1.2, 1.0, 1.0), 0.05, 1e-3);
  const auto hist = solve_backward(traj, terminal_datum(DatumSpec{}, traj.states.back()));
  const double as[] = {0.0, 1.0};
  std::vector<RowEvaluation> rows;
  for (std::size_t k = 0; k < traj.size(); ++k) rows.push_back(evaluate_row(traj.states[k], hist.entries[k], as));
  const auto chain = assemble_proof_chain(rows, traj.dt);
  auto records = records_from(rows);
  for (const auto& flag : equivalence_check(records, chain, 1e-8)) CHECK(flag.passed());
  // Off unit mass the two sides differ by exactly (mass - 1)(F^2 - 16 w^2) / (4 w).
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.a.size(); ++i) {
      const double w = r.omega[i];
      const double predicted = (r.mass - 1.0) * (r.F * r.F - 16.0 * w * w) / (4.0 * w);
      CHECK(std::abs((r.rhs_theorem[i] - r.rhs_ye[i]) - predicted) <= 1e-14);
    }
  }
  // On S^2 the volume is linear in t, RK4 keeps unit mass to rounding and the
  // two sides agree to rounding.
  const auto s2 = integrate_forward(round_sphere(2, 1.0), 0.05, 1e-3);
  const auto s2_hist = solve_backward(s2, terminal_datum(DatumSpec{}, s2.states.back()));
  for (std::size_t k = 0; k < s2.size(); ++k) {
    const auto r = evaluate_row(s2.states[k], s2_hist.entries[k], as);
    for (std::size_t i = 0; i < r.a.size(); ++i) CHECK(std::abs(r.rhs_theorem[i] - r.rhs_ye[i]) <= 1e-12);
  }
  // On S^3 the gap is the O(dt^4) mass error of the time stepper.
  auto s3_gap = [&](double dt) {
    const auto tr = integrate_forward(round_sphere(3, 1.0), 0.05, dt);
    const auto h = solve_backward(tr, terminal_datum(DatumSpec{}, tr.states.back()));
    const auto r = evaluate_row(tr.states[0], h.entries[0], as);
    return std::abs(r.rhs_theorem[1] - r.rhs_ye[1]);
  };
  const double coarse = s3_gap(1e-2);
  CHECK(coarse <= 1e-6);
  CHECK(coarse / s3_gap(5e-3) > 12.0);

  // Negative controls.
  records[3].adjusted[1].rhs_ye *= 1.0 + 1e-6;
  auto bad_chain = chain;
  bad_chain[5].gradient_f_moment = bad_chain[5].laplacian_f_moment + 1.0;
  const auto flags = equivalence_check(records, bad_chain, 1e-8);
  CHECK_FALSE(flags[3].rhs_agree);
  CHECK(flags[3].sub_identity);
  CHECK_FALSE(flags[5].sub_identity);
  CHECK(flags[5].rhs_agree);
  CHECK(flags[4].passed());

  const std::vector<double> falling{5.0, 4.0, 3.0, 2.0};
  const auto violations = monotonicity_check(falling, 1e-6);
  REQUIRE(violations.size() == 3);
  for (bool v : violations) CHECK(v);
  const std::vector<double> wiggle{1.0, 1.0 - 5e-7, 2.0};
  for (bool v : monotonicity_check(wiggle, 1e-6)) CHECK_FALSE(v);
}
