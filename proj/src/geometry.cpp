#include "riccilab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riccilab/errors.hpp"

namespace riccilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const ConformalTorus* torus_of(const MetricState& m) { return std::get_if<ConformalTorus>(&m.backend); }

void require_size(const MetricState& m, const ScalarField& w, const char* what) {
  if (w.size() != node_count(m.backend)) {
    throw Error(ErrorKind::Config, std::string(what) + ": field has " + std::to_string(w.size()) +
                                       " values, backend expects " +
                                       std::to_string(node_count(m.backend)));
  }
}

// Milnor-frame data of a Berger metric: mu_i = (l1 + l2 + l3)/2 - l_i where
// l_i are the structure constants in the orthonormal frame e_i = X_i / sqrt(P_i).
struct BergerFrame {
  double mu[3];
  double ric[3];  // principal Ricci values Ric(e_i, e_i)
};

BergerFrame berger_frame(const std::vector<double>& p) {
  const double root = std::sqrt(p[0] * p[1] * p[2]);
  double lambda[3];
  for (int i = 0; i < 3; ++i) lambda[i] = 2.0 * p[i] / root;
  const double half = 0.5 * (lambda[0] + lambda[1] + lambda[2]);
  BergerFrame f{};
  for (int i = 0; i < 3; ++i) f.mu[i] = half - lambda[i];
  f.ric[0] = 2.0 * f.mu[1] * f.mu[2];
  f.ric[1] = 2.0 * f.mu[0] * f.mu[2];
  f.ric[2] = 2.0 * f.mu[0] * f.mu[1];
  return f;
}

// First-difference helpers on the periodic grid.
struct Stencil {
  const ConformalTorus& g;
  std::span<const double> w;
  double h;

  double at(int i, int j) const { return w[g.index(i, j)]; }
  double fx(int i, int j) const { return (at(i + 1, j) - at(i, j)) / h; }
  double bx(int i, int j) const { return (at(i, j) - at(i - 1, j)) / h; }
  double fy(int i, int j) const { return (at(i, j + 1) - at(i, j)) / h; }
  double by(int i, int j) const { return (at(i, j) - at(i, j - 1)) / h; }
  double cx(int i, int j) const { return (at(i + 1, j) - at(i - 1, j)) / (2.0 * h); }
  double cy(int i, int j) const { return (at(i, j + 1) - at(i, j - 1)) / (2.0 * h); }
  double xx(int i, int j) const { return (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h); }
  double yy(int i, int j) const { return (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h * h); }
  double xy(int i, int j) const {
    return (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
  }
};

}  // namespace

int dimension(const BackendId& backend) {
  return std::visit(overloaded{[](const RoundSphere& s) { return s.n; },
                               [](const BergerSphere&) { return 3; },
                               [](const ConformalTorus&) { return 2; }},
                    backend);
}

std::size_t node_count(const BackendId& backend) {
  if (const auto* t = std::get_if<ConformalTorus>(&backend)) return t->nodes();
  return 1;
}

std::size_t param_count(const BackendId& backend) {
  return std::visit(overloaded{[](const RoundSphere&) -> std::size_t { return 1; },
                               [](const BergerSphere&) -> std::size_t { return 3; },
                               [](const ConformalTorus& t) { return t.nodes(); }},
                    backend);
}

bool is_homogeneous(const BackendId& backend) { return !std::holds_alternative<ConformalTorus>(backend); }

void validate(const BackendId& backend) {
  if (const auto* s = std::get_if<RoundSphere>(&backend); s && s->n < 2) {
    throw Error(ErrorKind::Config, "backend.n must be >= 2");
  }
  if (const auto* t = std::get_if<ConformalTorus>(&backend)) {
    if (t->N < 8 || t->N % 2 != 0) throw Error(ErrorKind::Config, "backend.N must be even and >= 8");
    if (!(t->L > 0.0) || !std::isfinite(t->L)) throw Error(ErrorKind::Config, "backend.L must be > 0");
  }
}

MetricState round_sphere(int n, double c, double t) {
  MetricState m{RoundSphere{n}, t, {c}};
  validate(m);
  return m;
}

MetricState berger_sphere(double a, double b, double c, double t) {
  MetricState m{BergerSphere{}, t, {a, b, c}};
  validate(m);
  return m;
}

MetricState conformal_torus(const ConformalTorus& grid, std::vector<double> phi, double t) {
  MetricState m{grid, t, std::move(phi)};
  validate(m);
  return m;
}

void validate(const MetricState& m) {
  validate(m.backend);
  if (m.params.size() != param_count(m.backend)) {
    throw Error(ErrorKind::Config, "metric parameter count does not match backend");
  }
  if (is_homogeneous(m.backend)) {
    for (double p : m.params) {
      if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::Config, "metric factors must be finite and > 0");
    }
  } else {
    for (double p : m.params) {
      if (!std::isfinite(p)) throw Error(ErrorKind::Config, "conformal exponent must be finite");
    }
  }
}

ScalarField constant_field(const BackendId& backend, double value) {
  return ScalarField{std::vector<double>(node_count(backend), value)};
}

double unit_sphere_volume(int n) {
  // Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  const double k = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

namespace torus {

std::vector<double> flat_laplacian(const ConformalTorus& grid, std::span<const double> w) {
  const int N = grid.N;
  Stencil s{grid, w, grid.spacing()};
  std::vector<double> out(grid.nodes());
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) out[grid.index(i, j)] = s.xx(i, j) + s.yy(i, j);
  }
  return out;
}

}  // namespace torus

ScalarField scalar_curvature(const MetricState& m) {
  return std::visit(
      overloaded{
          [&](const RoundSphere& s) {
            return ScalarField{{s.n * (s.n - 1) / m.params[0]}};
          },
          [&](const BergerSphere&) {
            const auto f = berger_frame(m.params);
            return ScalarField{{f.ric[0] + f.ric[1] + f.ric[2]}};
          },
          [&](const ConformalTorus& grid) {
            // R = -2 e^{-2 phi} Lap_0 phi on a flat background
            auto lap = torus::flat_laplacian(grid, m.params);
            for (std::size_t k = 0; k < lap.size(); ++k) lap[k] *= -2.0 * std::exp(-2.0 * m.params[k]);
            return ScalarField{std::move(lap)};
          }},
      m.backend);
}

SymTensorField ricci(const MetricState& m) {
  return std::visit(
      overloaded{
          [&](const RoundSphere& s) {
            return SymTensorField{std::vector<double>(s.n, (s.n - 1) / m.params[0])};
          },
          [&](const BergerSphere&) {
            const auto f = berger_frame(m.params);
            return SymTensorField{{f.ric[0], f.ric[1], f.ric[2]}};
          },
          [&](const ConformalTorus&) {
            // In two dimensions Ric = (R/2) g.
            const auto R = scalar_curvature(m);
            SymTensorField T{std::vector<double>(3 * R.size())};
            for (std::size_t k = 0; k < R.size(); ++k) {
              const double gk = std::exp(2.0 * m.params[k]);
              T.data[3 * k] = 0.5 * R[k] * gk;
              T.data[3 * k + 2] = 0.5 * R[k] * gk;
            }
            return T;
          }},
      m.backend);
}

SymTensorField metric_tensor(const MetricState& m) {
  if (const auto* grid = torus_of(m)) {
    SymTensorField T{std::vector<double>(3 * grid->nodes())};
    for (std::size_t k = 0; k < grid->nodes(); ++k) {
      const double gk = std::exp(2.0 * m.params[k]);
      T.data[3 * k] = gk;
      T.data[3 * k + 2] = gk;
    }
    return T;
  }
  return SymTensorField{std::vector<double>(dimension(m.backend), 1.0)};
}

ScalarField laplace_beltrami(const MetricState& m, const ScalarField& w) {
  require_size(m, w, "laplace_beltrami");
  const auto* grid = torus_of(m);
  if (!grid) return ScalarField{{0.0}};
  auto lap = torus::flat_laplacian(*grid, w.values);
  for (std::size_t k = 0; k < lap.size(); ++k) lap[k] *= std::exp(-2.0 * m.params[k]);
  return ScalarField{std::move(lap)};
}

ScalarField gradient_inner(const MetricState& m, const ScalarField& w, const ScalarField& z) {
  require_size(m, w, "gradient_inner");
  require_size(m, z, "gradient_inner");
  const auto* grid = torus_of(m);
  if (!grid) return ScalarField{{0.0}};
  const int N = grid->N;
  const double h = grid->spacing();
  Stencil sw{*grid, w.values, h};
  Stencil sz{*grid, z.values, h};
  ScalarField out{std::vector<double>(grid->nodes())};
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      // Mean of forward and backward products: sums to the 5-point Laplacian
      // under summation by parts.
      const double dot = 0.5 * (sw.fx(i, j) * sz.fx(i, j) + sw.bx(i, j) * sz.bx(i, j) +
                                sw.fy(i, j) * sz.fy(i, j) + sw.by(i, j) * sz.by(i, j));
      const auto k = grid->index(i, j);
      out[k] = std::exp(-2.0 * m.params[k]) * dot;
    }
  }
  return out;
}

ScalarField gradient_sq(const MetricState& m, const ScalarField& w) { return gradient_inner(m, w, w); }

SymTensorField gradient_outer(const MetricState& m, const ScalarField& w) {
  require_size(m, w, "gradient_outer");
  const auto* grid = torus_of(m);
  if (!grid) return SymTensorField{std::vector<double>(dimension(m.backend), 0.0)};
  const int N = grid->N;
  Stencil s{*grid, w.values, grid->spacing()};
  SymTensorField T{std::vector<double>(3 * grid->nodes())};
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const auto k = grid->index(i, j);
      const double fx = s.fx(i, j), bx = s.bx(i, j), fy = s.fy(i, j), by = s.by(i, j);
      T.data[3 * k] = 0.5 * (fx * fx + bx * bx);
      T.data[3 * k + 1] = s.cx(i, j) * s.cy(i, j);
      T.data[3 * k + 2] = 0.5 * (fy * fy + by * by);
    }
  }
  return T;
}

SymTensorField hessian(const MetricState& m, const ScalarField& w) {
  require_size(m, w, "hessian");
  const auto* grid = torus_of(m);
  if (!grid) return SymTensorField{std::vector<double>(dimension(m.backend), 0.0)};
  const int N = grid->N;
  const double h = grid->spacing();
  Stencil s{*grid, w.values, h};
  Stencil p{*grid, m.params, h};
  SymTensorField T{std::vector<double>(3 * grid->nodes())};
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const auto k = grid->index(i, j);
      const double wx = s.cx(i, j), wy = s.cy(i, j);
      const double px = p.cx(i, j), py = p.cy(i, j);
      // Christoffel symbols of e^{2 phi} delta: the phi_x w_x and phi_y w_y
      // corrections enter T11 and T22 with opposite signs, so the g-trace is
      // exactly e^{-2 phi} times the 5-point Laplacian.
      const double christoffel = px * wx - py * wy;
      T.data[3 * k] = s.xx(i, j) - christoffel;
      T.data[3 * k + 1] = s.xy(i, j) - py * wx - px * wy;
      T.data[3 * k + 2] = s.yy(i, j) + christoffel;
    }
  }
  return T;
}

double volume(const MetricState& m) {
  return std::visit(overloaded{[&](const RoundSphere& s) {
                                 return unit_sphere_volume(s.n) * std::pow(m.params[0], 0.5 * s.n);
                               },
                               [&](const BergerSphere&) {
                                 return unit_sphere_volume(3) * std::sqrt(m.params[0] * m.params[1] * m.params[2]);
                               },
                               [&](const ConformalTorus&) { return integrate(m, constant_field(m.backend, 1.0)); }},
                    m.backend);
}

double integrate(const MetricState& m, const ScalarField& w) {
  require_size(m, w, "integrate");
  const auto* grid = torus_of(m);
  if (!grid) return w[0] * volume(m);
  const double h = grid->spacing();
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * std::exp(2.0 * m.params[k]);
  return sum * h * h;
}

ScalarField tensor_norm_sq(const MetricState& m, const SymTensorField& T) {
  if (const auto* grid = torus_of(m)) {
    ScalarField out{std::vector<double>(grid->nodes())};
    for (std::size_t k = 0; k < grid->nodes(); ++k) {
      const double t11 = T.data[3 * k], t12 = T.data[3 * k + 1], t22 = T.data[3 * k + 2];
      out[k] = std::exp(-4.0 * m.params[k]) * (t11 * t11 + 2.0 * t12 * t12 + t22 * t22);
    }
    return out;
  }
  double sum = 0.0;
  for (double t : T.data) sum += t * t;
  return ScalarField{{sum}};
}

ScalarField trace(const MetricState& m, const SymTensorField& T) {
  if (const auto* grid = torus_of(m)) {
    ScalarField out{std::vector<double>(grid->nodes())};
    for (std::size_t k = 0; k < grid->nodes(); ++k) {
      out[k] = std::exp(-2.0 * m.params[k]) * (T.data[3 * k] + T.data[3 * k + 2]);
    }
    return out;
  }
  double sum = 0.0;
  for (double t : T.data) sum += t;
  return ScalarField{{sum}};
}

std::vector<double> ricci_flow_rhs(const MetricState& m) {
  return std::visit(
      overloaded{[&](const RoundSphere& s) { return std::vector<double>{-2.0 * (s.n - 1)}; },
                 [&](const BergerSphere&) {
                   // g(X_i, X_i) = P_i and Ric(X_i, X_i) = P_i Ric(e_i, e_i)
                   const auto f = berger_frame(m.params);
                   std::vector<double> d(3);
                   for (int i = 0; i < 3; ++i) d[i] = -2.0 * m.params[i] * f.ric[i];
                   return d;
                 },
                 [&](const ConformalTorus& grid) {
                   // dg/dt = -R g in 2-d, i.e. d(phi)/dt = -R/2 = e^{-2 phi} Lap_0 phi
                   auto lap = torus::flat_laplacian(grid, m.params);
                   for (std::size_t k = 0; k < lap.size(); ++k) lap[k] *= std::exp(-2.0 * m.params[k]);
                   return lap;
                 }},
      m.backend);
}

}  // namespace riccilab
