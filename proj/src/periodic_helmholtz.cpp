#include "periodic_helmholtz.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

namespace riccilab::detail {

namespace {
// FFTW planning is not thread-safe.
std::mutex planner_mutex;
}  // namespace

PeriodicHelmholtz::PeriodicHelmholtz(int n, double spacing, double shift) : n_(n) {
  const int half = n / 2 + 1;
  symbol_.resize(static_cast<std::size_t>(n) * half);
  const double scale = 4.0 / (spacing * spacing);
  for (int j = 0; j < n; ++j) {
    const double sy = std::sin(std::numbers::pi * j / n);
    for (int i = 0; i < half; ++i) {
      const double sx = std::sin(std::numbers::pi * i / n);
      symbol_[static_cast<std::size_t>(j) * half + i] = scale * (sx * sx + sy * sy) + shift;
    }
  }
  std::lock_guard lock(planner_mutex);
  real_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  spectrum_ = fftw_alloc_complex(static_cast<std::size_t>(n) * half);
  forward_ = fftw_plan_dft_r2c_2d(n, n, real_, spectrum_, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_2d(n, n, spectrum_, real_, FFTW_ESTIMATE);
}

PeriodicHelmholtz::~PeriodicHelmholtz() {
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
  fftw_free(real_);
  fftw_free(spectrum_);
}

void PeriodicHelmholtz::solve(std::span<const double> rhs, std::span<double> out) {
  const std::size_t total = static_cast<std::size_t>(n_) * n_;
  std::copy(rhs.begin(), rhs.end(), real_);
  fftw_execute(forward_);
  const double norm = 1.0 / static_cast<double>(total);
  for (std::size_t k = 0; k < symbol_.size(); ++k) {
    const double s = norm / symbol_[k];
    spectrum_[k][0] *= s;
    spectrum_[k][1] *= s;
  }
  fftw_execute(backward_);
  std::copy(real_, real_ + total, out.begin());
}

}  // namespace riccilab::detail
