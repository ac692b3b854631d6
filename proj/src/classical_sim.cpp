// Copyright 2026 The shuttle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shuttle/classical_sim.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

namespace odeint = boost::numeric::odeint;
using State2 = std::array<double, 2>;

double acceleration(const PotentialModel& model, std::span<const double> volts,
                    double x) {
  return -model.potential_unchecked(volts, x).d1 / model.mass();
}

void rk4_step(const PotentialModel& model, std::span<const double> u0,
              std::span<const double> umid, std::span<const double> u1,
              double dt, double& x, double& v) {
  const double h = 0.5 * dt;
  const double k1x = v, k1v = acceleration(model, u0, x);
  const double k2x = v + h * k1v, k2v = acceleration(model, umid, x + h * k1x);
  const double k3x = v + h * k2v, k3v = acceleration(model, umid, x + h * k2x);
  const double k4x = v + dt * k3v, k4v = acceleration(model, u1, x + dt * k3x);
  x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

namespace {

void check_inside(const PotentialModel& model, double t, double x, double v) {
  if (!std::isfinite(x) || !std::isfinite(v) || !model.window().contains(x))
    throw EscapeError(t, x);
}

auto make_stepper() {
  return odeint::make_controlled<odeint::runge_kutta_dopri5<State2>>(1e-13,
                                                                    1e-12);
}

ClassicalTrajectory fixed_step(const PotentialModel& model,
                               const VoltageRamp& ramp, double x0, double v0) {
  const std::size_t n = ramp.samples(), ch = ramp.channels();
  ClassicalTrajectory tr;
  tr.t.resize(n);
  tr.x.resize(n);
  tr.v.resize(n);
  std::vector<double> mid(ch);
  double x = x0, v = v0;
  const double dt = ramp.dt();
  tr.t[0] = 0.0;
  tr.x[0] = x;
  tr.v[0] = v;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto a = ramp.row(k), b = ramp.row(k + 1);
    for (std::size_t c = 0; c < ch; ++c) mid[c] = 0.5 * (a[c] + b[c]);
    rk4_step(model, a, mid, b, dt, x, v);
    check_inside(model, ramp.time(k + 1), x, v);
    tr.t[k + 1] = ramp.time(k + 1);
    tr.x[k + 1] = x;
    tr.v[k + 1] = v;
  }
  return tr;
}

ClassicalTrajectory adaptive(const PotentialModel& model,
                             const VoltageRamp& ramp, double x0, double v0) {
  const std::size_t n = ramp.samples(), ch = ramp.channels();
  ClassicalTrajectory tr;
  tr.t.resize(n);
  tr.x.resize(n);
  tr.v.resize(n);
  State2 s{x0, v0};
  tr.t[0] = 0.0;
  tr.x[0] = x0;
  tr.v[0] = v0;
  std::vector<double> u(ch);
  auto stepper = make_stepper();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double ta = ramp.time(k), tb = ramp.time(k + 1);
    auto a = ramp.row(k), b = ramp.row(k + 1);
    // Linear within one interval: the kinks sit on the integration nodes.
    auto rhs = [&](const State2& y, State2& dy, double t) {
      const double w = (t - ta) / (tb - ta);
      for (std::size_t c = 0; c < ch; ++c) u[c] = a[c] + w * (b[c] - a[c]);
      dy[0] = y[1];
      dy[1] = acceleration(model, u, y[0]);
    };
    odeint::integrate_adaptive(stepper, rhs, s, ta, tb, tb - ta);
    check_inside(model, tb, s[0], s[1]);
    tr.t[k + 1] = tb;
    tr.x[k + 1] = s[0];
    tr.v[k + 1] = s[1];
  }
  return tr;
}

}  // namespace

ClassicalTrajectory propagate_classical(const PotentialModel& model,
                                        const VoltageRamp& ramp, double x0,
                                        double v0, Integrator mode) {
  if (!model.window().contains(x0))
    fail(ErrorKind::domain, "initial position outside the working window");
  if (ramp.channels() != model.size())
    fail(ErrorKind::domain, "ramp channel count does not match the model");
  return mode == Integrator::rk4 ? fixed_step(model, ramp, x0, v0)
                                 : adaptive(model, ramp, x0, v0);
}

ClassicalTrajectory propagate_classical(const PotentialModel& model,
                                        const ControlFunction& control,
                                        double duration, std::size_t samples,
                                        std::span<const double> breakpoints,
                                        double x0, double v0) {
  if (!model.window().contains(x0))
    fail(ErrorKind::domain, "initial position outside the working window");
  if (samples < 2 || !(duration > 0.0))
    fail(ErrorKind::domain, "need a positive duration and >= 2 samples");
  std::vector<double> nodes;
  for (std::size_t k = 0; k < samples; ++k)
    nodes.push_back(k + 1 == samples ? duration
                                     : duration * double(k) / double(samples - 1));
  const std::size_t n_out = nodes.size();
  for (double b : breakpoints)
    if (b > 0.0 && b < duration) nodes.push_back(b);
  std::vector<char> is_out(nodes.size(), 0);
  std::fill(is_out.begin(), is_out.begin() + n_out, 1);
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return nodes[a] < nodes[b]; });

  ClassicalTrajectory tr;
  State2 s{x0, v0};
  std::vector<double> u(model.size());
  auto stepper = make_stepper();
  double t = 0.0;
  for (std::size_t idx : order) {
    const double tb = nodes[idx];
    if (tb > t) {
      // Evaluate the control strictly inside (t, tb) so a switch placed
      // exactly on a node never leaks into the neighbouring interval.
      const double ta = t, mid = 0.5 * (t + tb);
      auto rhs = [&](const State2& y, State2& dy, double tt) {
        control(std::clamp(tt, std::nextafter(ta, mid), std::nextafter(tb, mid)),
                u);
        dy[0] = y[1];
        dy[1] = acceleration(model, u, y[0]);
      };
      odeint::integrate_adaptive(stepper, rhs, s, ta, tb, tb - ta);
      check_inside(model, tb, s[0], s[1]);
      t = tb;
    }
    if (is_out[idx]) {
      tr.t.push_back(tb);
      tr.x.push_back(s[0]);
      tr.v.push_back(s[1]);
    }
  }
  return tr;
}

FinalEnergy final_energy(double x, double v, double mass, double omega,
                         double x_target) {
  const double dx = x - x_target;
  const double e = 0.5 * mass * v * v + 0.5 * mass * omega * omega * dx * dx;
  return {e, e / (units::hbar * omega)};
}

FinalEnergy final_energy(const ClassicalTrajectory& traj, double mass,
                         double omega, double x_target) {
  const auto s = traj.final_state();
  return final_energy(s.x, s.v, mass, omega, x_target);
}

StabilityWindow stability_window(const ExcitationOfTime& excitation,
                                 double threshold, double center,
                                 double resolution) {
  if (!(threshold > 0.0)) return {center, center, 0.0};
  auto inside = [&](double T) {
    try {
      return excitation(T) < threshold;
    } catch (const EscapeError&) {
      return false;
    }
  };
  if (!inside(center))
    fail(ErrorKind::no_window,
         "excitation at the center time is not below the threshold");
  auto edge = [&](double dir) {
    double good = center, step = 1e-4;  // 0.1 ns
    double bad = center;
    while (true) {
      const double trial = good + dir * step;
      if (!(trial > 0.0)) {
        bad = 0.0;
        break;
      }
      if (!inside(trial)) {
        bad = trial;
        break;
      }
      good = trial;
      step = std::min(2.0 * step, 5e-4);
    }
    while (std::abs(bad - good) > resolution) {
      const double mid = 0.5 * (good + bad);
      (inside(mid) ? good : bad) = mid;
    }
    return 0.5 * (good + bad);
  };
  const double lo = edge(-1.0), hi = edge(1.0);
  return {lo, hi, (hi - lo) * 1e3};
}

StabilityWindow stability_window(const PotentialModel& model,
                                 const VoltageRamp& ramp, double x_start,
                                 double x_target, double omega,
                                 double threshold, double center) {
  auto family = [&](double T) {
    const VoltageRamp r = ramp.stretched(T);
    const auto tr =
        propagate_classical(model, r, x_start, 0.0, Integrator::dopri5);
    return final_energy(tr, model.mass(), omega, x_target).phonons;
  };
  return stability_window(family, threshold, center);
}

void write_trajectory_csv(const std::string& path,
                          const ClassicalTrajectory& traj) {
  std::vector<std::vector<double>> rows(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    rows[k] = {traj.t[k], traj.x[k], traj.v[k]};
  csv::write(path, {"t_us", "x_um", "v_um_per_us"}, rows);
}

}  // namespace shuttle
