#include "riccilab/ricci_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riccilab/errors.hpp"

namespace riccilab {

namespace {

void check_blow_up(const MetricState& m) {
  const bool torus = !is_homogeneous(m.backend);
  for (double p : m.params) {
    const double factor = torus ? std::exp(2.0 * p) : p;
    if (!std::isfinite(p) || !(factor >= kBlowUpFloor)) {
      throw Error(ErrorKind::BlowUp, "metric parameter left the admissible range at t = " + std::to_string(m.t));
    }
  }
}

MetricState axpy(const MetricState& m, double scale, const std::vector<double>& dir, double t) {
  MetricState out{m.backend, t, m.params};
  for (std::size_t k = 0; k < out.params.size(); ++k) out.params[k] += scale * dir[k];
  return out;
}

}  // namespace

double stability_dt(const MetricState& m, double safety) {
  if (const auto* grid = std::get_if<ConformalTorus>(&m.backend)) {
    const double h = grid->spacing();
    const double min_phi = *std::min_element(m.params.begin(), m.params.end());
    return safety * h * h * std::exp(2.0 * min_phi) / 8.0;
  }
  return safety * *std::min_element(m.params.begin(), m.params.end()) / 8.0;
}

Trajectory integrate_forward(const MetricState& m0, double horizon, double dt) {
  validate(m0);
  if (!(horizon > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::Config, "horizon and dt must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (steps < 1) throw Error(ErrorKind::Config, "horizon shorter than one step");

  Trajectory traj{m0.backend, {}, {}, dt};
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(m0.t);
  traj.states.push_back(m0);

  for (std::size_t k = 0; k < steps; ++k) {
    const MetricState& m = traj.states.back();
    if (dt > stability_dt(m, 1.0)) {
      throw Error(ErrorKind::StepTooLarge, "dt = " + std::to_string(dt) + " exceeds stability bound " +
                                               std::to_string(stability_dt(m, 1.0)) + " at t = " +
                                               std::to_string(m.t));
    }
    const double t = m0.t + static_cast<double>(k) * dt;
    const double t_next = m0.t + static_cast<double>(k + 1) * dt;

    const auto k1 = ricci_flow_rhs(m);
    auto s2 = axpy(m, 0.5 * dt, k1, t + 0.5 * dt);
    check_blow_up(s2);
    const auto k2 = ricci_flow_rhs(s2);
    auto s3 = axpy(m, 0.5 * dt, k2, t + 0.5 * dt);
    check_blow_up(s3);
    const auto k3 = ricci_flow_rhs(s3);
    auto s4 = axpy(m, dt, k3, t_next);
    check_blow_up(s4);
    const auto k4 = ricci_flow_rhs(s4);

    MetricState next{m.backend, t_next, m.params};
    for (std::size_t i = 0; i < next.params.size(); ++i) {
      next.params[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_blow_up(next);
    traj.times.push_back(t_next);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

MetricState sample(const Trajectory& traj, double t) {
  const double slack = 1e-12 * std::max(1.0, std::abs(traj.end()));
  if (traj.states.empty() || t < traj.start() - slack || t > traj.end() + slack) {
    throw Error(ErrorKind::OutOfRange, "t = " + std::to_string(t) + " outside trajectory");
  }
  const auto last = traj.size() - 1;
  const double pos = std::clamp((t - traj.start()) / traj.dt, 0.0, static_cast<double>(last));
  auto k = static_cast<std::size_t>(std::floor(pos));
  if (k >= last) return traj.states[last];
  // Snap to grid times so that sampling is exact there.
  if (std::abs(t - traj.times[k]) <= slack) return traj.states[k];
  if (std::abs(t - traj.times[k + 1]) <= slack) return traj.states[k + 1];

  const double span = traj.times[k + 1] - traj.times[k];
  const double w = (t - traj.times[k]) / span;
  MetricState out{traj.backend, t, traj.states[k].params};
  const auto& upper = traj.states[k + 1].params;
  // Cubic Hermite through both snapshots and their flow velocities.
  const auto d0 = ricci_flow_rhs(traj.states[k]);
  const auto d1 = ricci_flow_rhs(traj.states[k + 1]);
  const double h00 = (1.0 + 2.0 * w) * (1.0 - w) * (1.0 - w);
  const double h10 = w * (1.0 - w) * (1.0 - w);
  const double h01 = w * w * (3.0 - 2.0 * w);
  const double h11 = w * w * (w - 1.0);
  for (std::size_t i = 0; i < out.params.size(); ++i) {
    out.params[i] = h00 * out.params[i] + h10 * span * d0[i] + h01 * upper[i] + h11 * span * d1[i];
  }
  return out;
}

}  // namespace riccilab
