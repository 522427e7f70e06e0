#include "riccilab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "periodic_helmholtz.hpp"
#include "riccilab/errors.hpp"

namespace riccilab {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

// Generalized torus eigenproblem A x = lambda M x with A = -Lap_0 + q and
// M = diag(e^{2 phi}); q = (R/4) e^{2 phi} = -Lap_0(phi) / 2.
class TorusEigenproblem {
 public:
  explicit TorusEigenproblem(const MetricState& m)
      : grid_(std::get<ConformalTorus>(m.backend)), weight_(grid_.nodes()), potential_(grid_.nodes()) {
    const auto lap_phi = torus::flat_laplacian(grid_, m.params);
    for (std::size_t k = 0; k < weight_.size(); ++k) {
      weight_[k] = std::exp(2.0 * m.params[k]);
      potential_[k] = -0.5 * lap_phi[k];
    }
    double min_r4 = potential_[0] / weight_[0];
    for (std::size_t k = 1; k < weight_.size(); ++k) min_r4 = std::min(min_r4, potential_[k] / weight_[k]);
    shift_ = min_r4 - 1.0;
    // Shifted diagonal d = (R/4 - shift) e^{2 phi} >= e^{2 phi} > 0.
    diagonal_.resize(weight_.size());
    for (std::size_t k = 0; k < weight_.size(); ++k) diagonal_[k] = potential_[k] - shift_ * weight_[k];
    const double mean = std::accumulate(diagonal_.begin(), diagonal_.end(), 0.0) / diagonal_.size();
    preconditioner_.emplace(grid_.N, grid_.spacing(), mean);
  }

  double shift() const { return shift_; }
  const std::vector<double>& weight() const { return weight_; }

  // A x
  std::vector<double> apply(std::span<const double> x) const {
    auto y = torus::flat_laplacian(grid_, x);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = -y[k] + potential_[k] * x[k];
    return y;
  }

  // (A - shift M) y = b by preconditioned CG, starting from y.
  void solve_shifted(std::span<const double> b, std::vector<double>& y) {
    const std::size_t n = b.size();
    auto apply_shifted = [&](std::span<const double> x) {
      auto out = torus::flat_laplacian(grid_, x);
      for (std::size_t k = 0; k < n; ++k) out[k] = -out[k] + diagonal_[k] * x[k];
      return out;
    };
    std::vector<double> r(n), z(n), p(n);
    {
      const auto Ay = apply_shifted(y);
      for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - Ay[k];
    }
    const double target = 1e-14 * std::sqrt(dot(b, b));
    preconditioner_->solve(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 0; it < 1000; ++it) {
      if (std::sqrt(dot(r, r)) <= target) return;
      const auto Ap = apply_shifted(p);
      const double alpha = rz / dot(p, Ap);
      for (std::size_t k = 0; k < n; ++k) {
        y[k] += alpha * p[k];
        r[k] -= alpha * Ap[k];
      }
      preconditioner_->solve(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    if (std::sqrt(dot(r, r)) > 1e3 * target) {
      throw Error(ErrorKind::NoConvergence, "shifted CG solve did not converge");
    }
  }

 private:
  ConformalTorus grid_;
  std::vector<double> weight_;
  std::vector<double> potential_;
  std::vector<double> diagonal_;
  double shift_ = 0.0;
  std::optional<detail::PeriodicHelmholtz> preconditioner_;
};

}  // namespace

double f_functional(const MetricState& m, const ScalarField& u) {
  const auto R = scalar_curvature(m);
  auto integrand = gradient_sq(m, u);
  for (std::size_t k = 0; k < integrand.size(); ++k) integrand[k] = 4.0 * integrand[k] + R[k] * u[k] * u[k];
  return integrate(m, integrand);
}

double f_functional_f_form(const MetricState& m, const ScalarField& f) {
  const auto R = scalar_curvature(m);
  auto integrand = gradient_sq(m, f);
  for (std::size_t k = 0; k < integrand.size(); ++k) integrand[k] = (R[k] + integrand[k]) * std::exp(-f[k]);
  return integrate(m, integrand);
}

double shannon_entropy(const MetricState& m, const ScalarField& u) {
  ScalarField integrand{std::vector<double>(u.size())};
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = u[k] * u[k];
    integrand[k] = v * std::log(v);
  }
  return integrate(m, integrand);
}

double omega(double F, double a) {
  const double w = a + 0.25 * F;
  if (!(w > 0.0)) {
    throw Error(ErrorKind::NonPositiveOmega, "omega = " + std::to_string(w) + " for a = " + std::to_string(a));
  }
  return w;
}

double log_entropy(const MetricState& m, const ScalarField& u, double a, double t) {
  const double w = omega(f_functional(m, u), a);
  const int n = dimension(m.backend);
  return -shannon_entropy(m, u) + 0.5 * n * std::log(w) + 4.0 * a * t;
}

double rayleigh_quotient(const MetricState& m, const ScalarField& x) {
  const auto R = scalar_curvature(m);
  auto energy = gradient_sq(m, x);
  ScalarField sq{std::vector<double>(x.size())};
  for (std::size_t k = 0; k < x.size(); ++k) {
    energy[k] += 0.25 * R[k] * x[k] * x[k];
    sq[k] = x[k] * x[k];
  }
  return integrate(m, energy) / integrate(m, sq);
}

Lambda0Result lambda0(const MetricState& m, const Lambda0Options& options) {
  validate(m);
  if (is_homogeneous(m.backend)) {
    // Constant R: the constant function is the ground state since -Lap >= 0.
    const double vol = volume(m);
    return {0.25 * scalar_curvature(m)[0], ScalarField{{1.0 / std::sqrt(vol)}}, 0};
  }

  TorusEigenproblem problem(m);
  const auto& weight = problem.weight();
  const std::size_t n = weight.size();
  const auto& grid = std::get<ConformalTorus>(m.backend);
  const double cell = grid.spacing() * grid.spacing();

  std::vector<double> x = options.start ? options.start->values : std::vector<double>(n, 1.0);
  if (x.size() != n) throw Error(ErrorKind::Config, "lambda0 start vector has the wrong size");
  auto m_norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += weight[k] * v[k] * v[k];
    return std::sqrt(s);
  };
  auto rayleigh = [&](const std::vector<double>& v) {
    return dot(v, problem.apply(v)) / (m_norm(v) * m_norm(v));
  };

  double rq = rayleigh(x);
  std::vector<double> b(n), y(n);
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      b[k] = weight[k] * x[k];
      y[k] = x[k] / (rq - problem.shift());
    }
    problem.solve_shifted(b, y);
    const double norm = m_norm(y);
    for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / norm;
    const double next = rayleigh(x);
    const bool done = std::abs(next - rq) <= options.tolerance * std::max(1.0, std::abs(next));
    rq = next;
    if (done) {
      // Unit norm in L^2(dmu): the M-norm already carries e^{2 phi}; add h^2.
      const double scale = 1.0 / std::sqrt(cell);
      for (auto& xi : x) xi *= scale;
      return {rq, ScalarField{std::move(x)}, it};
    }
  }
  throw Error(ErrorKind::NoConvergence, "inverse iteration exceeded " + std::to_string(options.max_iterations) +
                                            " iterations");
}

}  // namespace riccilab
