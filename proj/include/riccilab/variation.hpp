#pragma once

#include <span>
#include <vector>

#include "riccilab/conjugate_heat.hpp"
#include "riccilab/functionals.hpp"
#include "riccilab/geometry.hpp"
#include "riccilab/ricci_flow.hpp"

namespace riccilab {

/// Ric - 2 Hess(u)/u + 2 grad u (x) grad u / u^2, the u-form of Ric + Hess f
/// with f = -2 ln u. Throws Error(PositivityLoss) unless u > 0.
SymTensorField matrix_quantity(const MetricState& m, const ScalarField& u);

/// Ric + Hess f evaluated with stencils applied directly to f. Matches the
/// u-form up to O(h^2) on the torus.
SymTensorField matrix_quantity_f_form(const MetricState& m, const ScalarField& f);

/// (n / 4w) int |Q - (4(w - a)/n) g|^2 u^2 dmu + 4 a^2 / w, with Q the matrix
/// quantity and w = a + F/4.
double rhs_theorem(const MetricState& m, const ScalarField& u, double a);

/// (n / 4w) int |Q - (4w/n) g|^2 u^2 dmu.
double rhs_ye(const MetricState& m, const ScalarField& u, double a);

/// Everything the variation checks need from one (metric, density) pair.
/// Q is built once and shared by both right-hand sides.
struct RowEvaluation {
  double t = 0.0;
  double F = 0.0;
  double S = 0.0;
  double mass = 0.0;
  /// 2 int |Q|^2 u^2 dmu, the predicted dF/dt.
  double bochner = 0.0;
  /// int Lap f e^{-f} dmu and int |grad f|^2 e^{-f} dmu, with the f
  /// derivatives written through u.
  double laplacian_f_moment = 0.0;
  double gradient_f_moment = 0.0;
  std::vector<double> a;
  std::vector<double> Y;
  std::vector<double> omega;
  std::vector<double> rhs_theorem;
  std::vector<double> rhs_ye;
};

RowEvaluation evaluate_row(const MetricState& m, const DensityField& density, std::span<const double> a_values);

struct FdDerivative {
  std::vector<double> values;
  /// True where the stencil is not the interior one; such points are
  /// excluded from acceptance statistics.
  std::vector<bool> endpoint;
};

/// Seven-point differences: sixth-order central where the window fits, the
/// same window shifted against the ends otherwise. Fewer than seven samples
/// use all of them.
/// Throws Error(TooFewSamples) for fewer than 3 samples.
FdDerivative fd_time_derivative(std::span<const double> series, double dt);

/// Proof-chain columns per time step: dS/dt against F and dF/dt against
/// 2 int |Ric + Hess f|^2 e^{-f} dmu.
struct VariationRow {
  double t = 0.0;
  bool endpoint = false;
  double mass = 0.0;
  double F = 0.0;
  double S = 0.0;
  double dS_dt_fd = 0.0;
  double dF_dt_fd = 0.0;
  double dF_rhs = 0.0;
  double residual_S = 0.0;
  double residual_F = 0.0;
  double laplacian_f_moment = 0.0;
  double gradient_f_moment = 0.0;
};

std::vector<VariationRow> assemble_proof_chain(std::span<const RowEvaluation> rows, double dt);

/// Evaluates every snapshot of an aligned trajectory/history pair.
std::vector<VariationRow> proof_chain_check(const Trajectory& traj, const DensityHistory& hist);

struct EquivalenceFlag {
  bool rhs_agree = false;
  bool sub_identity = false;
  bool passed() const { return rhs_agree && sub_identity; }
};

/// Per row: |rhs_theorem - rhs_ye| <= tol * max(1, |rhs_theorem|) for every a,
/// and int Lap f e^{-f} = int |grad f|^2 e^{-f} to sub_identity_tol relative.
std::vector<EquivalenceFlag> equivalence_check(std::span<const EntropyRecord> rows,
                                               std::span<const VariationRow> chain, double tol,
                                               double sub_identity_tol = 1e-9);

/// violations[k] is true when Y[k + 1] < Y[k] - tol.
std::vector<bool> monotonicity_check(std::span<const double> Y, double tol);

}  // namespace riccilab
