#pragma once

#include <optional>
#include <vector>

#include "riccilab/geometry.hpp"

namespace riccilab {

/// F = 4 int (|grad u|^2 + R u^2 / 4) dmu, written in u-variables.
double f_functional(const MetricState& m, const ScalarField& u);

/// int (R + |grad f|^2) e^{-f} dmu with |grad f|^2 taken by the same stencil
/// directly on f. Agrees with f_functional up to the stencil's O(h^2) error
/// on the torus and exactly on homogeneous backends.
double f_functional_f_form(const MetricState& m, const ScalarField& f);

/// S = -int f e^{-f} dmu = int u^2 ln u^2 dmu. The log entropy uses -S.
double shannon_entropy(const MetricState& m, const ScalarField& u);

/// a + F/4. Throws Error(NonPositiveOmega) if the result is <= 0.
double omega(double F, double a);

/// Y_a = -int u^2 ln u^2 dmu + (n/2) ln(omega) + 4 a t.
double log_entropy(const MetricState& m, const ScalarField& u, double a, double t);

struct Lambda0Result {
  double value = 0.0;
  /// Ground state normalized to unit L^2(dmu) norm.
  ScalarField eigenvector;
  int iterations = 0;
};

struct Lambda0Options {
  double tolerance = 1e-10;  // on successive Rayleigh quotients
  int max_iterations = 10000;
  /// Start vector; the constant function when absent.
  std::optional<ScalarField> start;
};

/// Smallest eigenvalue of -Lap_g + R/4.
///
/// Constant-curvature backends return R/4. On the torus this is the
/// generalized problem (-Lap_0 + (R/4) e^{2 phi}) x = lambda e^{2 phi} x,
/// solved by shifted inverse iteration with shift min(R/4) - 1; the inner
/// solves use CG preconditioned with an FFT Helmholtz inverse.
/// Throws Error(NoConvergence) past max_iterations.
Lambda0Result lambda0(const MetricState& m, const Lambda0Options& options = {});

/// (int |grad x|^2 + R x^2 / 4 dmu) / int x^2 dmu.
double rayleigh_quotient(const MetricState& m, const ScalarField& x);

/// Values that depend on the adjustment parameter a.
struct AdjustedEntry {
  double a = 0.0;
  double Y = 0.0;
  double omega = 0.0;
  double dY_dt_fd = 0.0;
  double rhs_theorem = 0.0;
  double rhs_ye = 0.0;
  double residual_theorem = 0.0;
  double residual_equivalence = 0.0;
};

/// One row of the run's time series.
struct EntropyRecord {
  double t = 0.0;
  double F = 0.0;
  double S = 0.0;
  double lambda0 = 0.0;
  std::vector<AdjustedEntry> adjusted;
};

}  // namespace riccilab
