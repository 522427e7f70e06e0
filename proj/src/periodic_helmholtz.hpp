#pragma once

#include <complex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace riccilab::detail {

/// Exact inverse of (-Lap_0 + shift) for the 5-point periodic Laplacian,
/// applied through FFTW. Owns its plans and buffers; not shareable across
/// threads while in use.
class PeriodicHelmholtz {
 public:
  PeriodicHelmholtz(int n, double spacing, double shift);
  ~PeriodicHelmholtz();
  PeriodicHelmholtz(const PeriodicHelmholtz&) = delete;
  PeriodicHelmholtz& operator=(const PeriodicHelmholtz&) = delete;

  void solve(std::span<const double> rhs, std::span<double> out);

 private:
  int n_;
  std::vector<double> symbol_;  // eigenvalues of -Lap_0 + shift per retained mode
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace riccilab::detail
