#include "riccilab/variation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "riccilab/errors.hpp"

namespace riccilab {

namespace {

constexpr std::size_t kFdWindow = 7;

// Fornberg's recursion for first-derivative weights at 0 on arbitrary nodes
// (in units of the step).
std::vector<double> first_derivative_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  c[0][0] = 1.0;
  double c1 = 1.0, c4 = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

// -2 Hess(u)/u + 2 grad u (x) grad u / u^2, i.e. Hess f written through u.
SymTensorField hessian_f_via_u(const MetricState& m, const ScalarField& u) {
  for (double x : u.values) {
    if (!(x > 0.0)) throw Error(ErrorKind::PositivityLoss, "matrix quantity needs u > 0");
  }
  auto H = hessian(m, u);
  const auto G = gradient_outer(m, u);
  const std::size_t per_node = H.data.size() / u.size();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double inv = 1.0 / u[k];
    for (std::size_t c = 0; c < per_node; ++c) {
      const auto idx = per_node * k + c;
      H.data[idx] = -2.0 * H.data[idx] * inv + 2.0 * G.data[idx] * inv * inv;
    }
  }
  return H;
}

SymTensorField add(SymTensorField a, const SymTensorField& b, double scale = 1.0) {
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += scale * b.data[i];
  return a;
}

// int |Q - c g|^2_g u^2 dmu
double deviation_integral(const MetricState& m, const SymTensorField& Q, const SymTensorField& g,
                          const ScalarField& u, double c) {
  auto norm = tensor_norm_sq(m, add(Q, g, -c));
  for (std::size_t k = 0; k < u.size(); ++k) norm[k] *= u[k] * u[k];
  return integrate(m, norm);
}

double rhs_with_coefficient(const MetricState& m, const ScalarField& u, double a, bool theorem_form) {
  const int n = dimension(m.backend);
  const double w = omega(f_functional(m, u), a);
  const auto Q = matrix_quantity(m, u);
  const auto g = metric_tensor(m);
  if (theorem_form) {
    return n / (4.0 * w) * deviation_integral(m, Q, g, u, 4.0 * (w - a) / n) + 4.0 * a * a / w;
  }
  return n / (4.0 * w) * deviation_integral(m, Q, g, u, 4.0 * w / n);
}

}  // namespace

SymTensorField matrix_quantity(const MetricState& m, const ScalarField& u) {
  return add(ricci(m), hessian_f_via_u(m, u));
}

SymTensorField matrix_quantity_f_form(const MetricState& m, const ScalarField& f) {
  return add(ricci(m), hessian(m, f));
}

double rhs_theorem(const MetricState& m, const ScalarField& u, double a) {
  return rhs_with_coefficient(m, u, a, true);
}

double rhs_ye(const MetricState& m, const ScalarField& u, double a) { return rhs_with_coefficient(m, u, a, false); }

RowEvaluation evaluate_row(const MetricState& m, const DensityField& density, std::span<const double> a_values) {
  const auto vars = change_variables(density);
  const auto& u = vars.u;
  const int n = dimension(m.backend);

  RowEvaluation row;
  row.t = m.t;
  row.F = f_functional(m, u);
  row.S = shannon_entropy(m, u);
  row.mass = integrate(m, density.v);

  const auto hess_f = hessian_f_via_u(m, u);
  const auto Q = add(ricci(m), hess_f);
  const auto g = metric_tensor(m);
  row.bochner = 2.0 * deviation_integral(m, Q, g, u, 0.0);

  auto lap_f = trace(m, hess_f);
  auto grad_f = gradient_sq(m, u);
  for (std::size_t k = 0; k < u.size(); ++k) {
    lap_f[k] *= u[k] * u[k];
    grad_f[k] *= 4.0;  // |grad f|^2 e^{-f} = 4 |grad u|^2
  }
  row.laplacian_f_moment = integrate(m, lap_f);
  row.gradient_f_moment = integrate(m, grad_f);

  for (double a : a_values) {
    const double w = omega(row.F, a);
    row.a.push_back(a);
    row.omega.push_back(w);
    row.Y.push_back(-row.S + 0.5 * n * std::log(w) + 4.0 * a * m.t);
    row.rhs_theorem.push_back(n / (4.0 * w) * deviation_integral(m, Q, g, u, 4.0 * (w - a) / n) +
                              4.0 * a * a / w);
    row.rhs_ye.push_back(n / (4.0 * w) * deviation_integral(m, Q, g, u, 4.0 * w / n));
  }
  return row;
}

FdDerivative fd_time_derivative(std::span<const double> y, double dt) {
  const std::size_t count = y.size();
  if (count < 3) throw Error(ErrorKind::TooFewSamples, "finite differences need at least 3 samples");
  FdDerivative d{std::vector<double>(count), std::vector<bool>(count, false)};

  // Seven-point windows: centred (sixth order) where they fit, shifted
  // against the ends otherwise. Short series use every sample.
  const std::size_t width = std::min<std::size_t>(kFdWindow, count);
  const std::size_t half = width / 2;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t first = std::min(k > half ? k - half : 0, count - width);
    std::vector<double> offsets(width);
    for (std::size_t i = 0; i < width; ++i) offsets[i] = static_cast<double>(first + i) - static_cast<double>(k);
    const auto w = first_derivative_weights(offsets);
    double sum = 0.0;
    // The weights sum to zero; differencing against y[k] keeps constants exact.
    for (std::size_t i = 0; i < width; ++i) sum += w[i] * (y[first + i] - y[k]);
    d.values[k] = sum / dt;
    d.endpoint[k] = width % 2 == 0 || first + half != k;
  }
  return d;
}

std::vector<VariationRow> assemble_proof_chain(std::span<const RowEvaluation> rows, double dt) {
  std::vector<double> S(rows.size()), F(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    S[k] = rows[k].S;
    F[k] = rows[k].F;
  }
  const auto dS = fd_time_derivative(S, dt);
  const auto dF = fd_time_derivative(F, dt);

  std::vector<VariationRow> out(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& r = out[k];
    r.t = rows[k].t;
    r.endpoint = dS.endpoint[k];
    r.mass = rows[k].mass;
    r.F = F[k];
    r.S = S[k];
    r.dS_dt_fd = dS.values[k];
    r.dF_dt_fd = dF.values[k];
    r.dF_rhs = rows[k].bochner;
    r.residual_S = std::abs(r.dS_dt_fd - r.F);
    r.residual_F = std::abs(r.dF_dt_fd - r.dF_rhs);
    r.laplacian_f_moment = rows[k].laplacian_f_moment;
    r.gradient_f_moment = rows[k].gradient_f_moment;
  }
  return out;
}

std::vector<VariationRow> proof_chain_check(const Trajectory& traj, const DensityHistory& hist) {
  if (traj.size() != hist.size()) throw Error(ErrorKind::Config, "trajectory and density history are not aligned");
  std::vector<RowEvaluation> rows;
  rows.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) rows.push_back(evaluate_row(traj.states[k], hist.entries[k], {}));
  return assemble_proof_chain(rows, traj.dt);
}

std::vector<EquivalenceFlag> equivalence_check(std::span<const EntropyRecord> rows,
                                               std::span<const VariationRow> chain, double tol,
                                               double sub_identity_tol) {
  std::vector<EquivalenceFlag> flags(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    bool agree = true;
    for (const auto& e : rows[k].adjusted) {
      agree = agree && std::abs(e.rhs_theorem - e.rhs_ye) <= tol * std::max(1.0, std::abs(e.rhs_theorem));
    }
    flags[k].rhs_agree = agree;
    if (k < chain.size()) {
      const double lhs = chain[k].laplacian_f_moment, rhs = chain[k].gradient_f_moment;
      const double scale = std::max(std::abs(lhs), std::abs(rhs));
      flags[k].sub_identity = std::abs(lhs - rhs) <= sub_identity_tol * scale + 1e-14;
    }
  }
  return flags;
}

std::vector<bool> monotonicity_check(std::span<const double> Y, double tol) {
  std::vector<bool> violations(Y.size() > 0 ? Y.size() - 1 : 0, false);
  for (std::size_t k = 0; k + 1 < Y.size(); ++k) violations[k] = Y[k + 1] < Y[k] - tol;
  return violations;
}

}  // namespace riccilab
