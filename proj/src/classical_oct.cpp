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

#include "shuttle/classical_oct.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

std::vector<double> default_shape(std::size_t samples) {
  std::vector<double> s(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double v = std::sin(units::pi * double(k) / double(samples - 1));
    s[k] = v * v;
  }
  s.front() = 0.0;
  s.back() = 0.0;
  return s;
}

namespace {

std::vector<double> resolve_shape(const OptimizationConfig& cfg,
                                  std::size_t samples) {
  if (!(cfg.lambda_a > 0.0) && !(cfg.initial_step > 0.0))
    fail(ErrorKind::config, "need lambda_a > 0 or initial_step > 0");
  if (cfg.shape.empty()) return default_shape(samples);
  if (cfg.shape.size() != samples)
    fail(ErrorKind::config, "shape length must match the ramp sample count");
  if (cfg.shape.front() != 0.0 || cfg.shape.back() != 0.0)
    fail(ErrorKind::config, "shape must vanish at both ends");
  for (double s : cfg.shape)
    if (!(s >= 0.0)) fail(ErrorKind::config, "shape must be non-negative");
  return cfg.shape;
}

// V''/m along the stored trajectory at node k, and at the midpoint of
// [k, k+1] (cubic Hermite position, averaged voltages).
struct Curvatures {
  const PotentialModel& model;
  const VoltageRamp& ramp;
  const ClassicalTrajectory& traj;
  std::vector<double> mid;

  double node(std::size_t k) const {
    return model.potential_unchecked(ramp.row(k), traj.x[k]).d2 /
           model.mass();
  }
  double midpoint(std::size_t k) {
    const double dt = ramp.dt();
    const double xm = 0.5 * (traj.x[k] + traj.x[k + 1]) +
                      dt * (traj.v[k] - traj.v[k + 1]) / 8.0;
    auto a = ramp.row(k), b = ramp.row(k + 1);
    mid.resize(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) mid[c] = 0.5 * (a[c] + b[c]);
    return model.potential_unchecked(mid, xm).d2 / model.mass();
  }
};

// One RK4 step of p1' = c p2, p2' = -p1 with signed step h.
void costate_step(double c0, double cm, double c1, double h, double& p1,
                  double& p2) {
  const double a1 = c0 * p2, b1 = -p1;
  const double a2 = cm * (p2 + 0.5 * h * b1), b2 = -(p1 + 0.5 * h * a1);
  const double a3 = cm * (p2 + 0.5 * h * b2), b3 = -(p1 + 0.5 * h * a2);
  const double a4 = c1 * (p2 + h * b3), b4 = -(p1 + h * a3);
  p1 += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
  p2 += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
}

void check_grid(const VoltageRamp& ramp, const ClassicalTrajectory& traj) {
  if (traj.size() != ramp.samples())
    fail(ErrorKind::domain, "trajectory and ramp grids differ");
}

}  // namespace

double classical_functional(const ClassicalTrajectory& traj,
                            const PotentialModel& model,
                            const OptimizationConfig& cfg) {
  const double e =
      final_energy(traj, model.mass(), cfg.omega, cfg.x_target).energy -
      cfg.target_energy;
  return e * e;
}

std::array<double, 2> terminal_costate(const ClassicalTrajectory& traj,
                                       const PotentialModel& model,
                                       const OptimizationConfig& cfg) {
  const auto s = traj.final_state();
  const double m = model.mass();
  const double de =
      final_energy(s.x, s.v, m, cfg.omega, cfg.x_target).energy -
      cfg.target_energy;
  return {-2.0 * m * de * cfg.omega * cfg.omega * (s.x - cfg.x_target),
          -2.0 * m * de * s.v};
}

CostateVector costate_backward(const PotentialModel& model,
                               const VoltageRamp& ramp,
                               const ClassicalTrajectory& traj,
                               std::array<double, 2> p_final) {
  check_grid(ramp, traj);
  const std::size_t n = ramp.samples();
  CostateVector p{std::vector<double>(n), std::vector<double>(n)};
  double p1 = p_final[0], p2 = p_final[1];
  p.p1[n - 1] = p1;
  p.p2[n - 1] = p2;
  Curvatures c{model, ramp, traj, {}};
  double c_hi = c.node(n - 1);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double c_lo = c.node(k);
    costate_step(c_hi, c.midpoint(k), c_lo, -ramp.dt(), p1, p2);
    if (!std::isfinite(p1) || !std::isfinite(p2))
      fail(ErrorKind::divergence, "costate became non-finite");
    p.p1[k] = p1;
    p.p2[k] = p2;
    c_hi = c_lo;
  }
  return p;
}

CostateVector costate_backward(const PotentialModel& model,
                               const VoltageRamp& ramp,
                               const ClassicalTrajectory& traj,
                               const OptimizationConfig& cfg) {
  return costate_backward(model, ramp, traj,
                          terminal_costate(traj, model, cfg));
}

CostateVector costate_forward(const PotentialModel& model,
                              const VoltageRamp& ramp,
                              const ClassicalTrajectory& traj,
                              std::array<double, 2> p_initial) {
  check_grid(ramp, traj);
  const std::size_t n = ramp.samples();
  CostateVector p{std::vector<double>(n), std::vector<double>(n)};
  double p1 = p_initial[0], p2 = p_initial[1];
  p.p1[0] = p1;
  p.p2[0] = p2;
  Curvatures c{model, ramp, traj, {}};
  double c_lo = c.node(0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double c_hi = c.node(k + 1);
    costate_step(c_lo, c.midpoint(k), c_hi, ramp.dt(), p1, p2);
    p.p1[k + 1] = p1;
    p.p2[k + 1] = p2;
    c_lo = c_hi;
  }
  return p;
}

double predicted_change(const PotentialModel& model,
                        const ClassicalTrajectory& traj,
                        const CostateVector& p, const VoltageRamp& delta) {
  const std::size_t n = delta.samples();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double g = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i)
      g += model.electrode(i).eval(traj.x[k]).d1 * delta(k, i);
    const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
    acc += w * p.p2[k] * g;
  }
  return acc * delta.dt() * units::volt_energy / model.mass();
}

VoltageRamp krotov_direction(const PotentialModel& model,
                             const ClassicalTrajectory& traj,
                             const CostateVector& p,
                             std::span<const double> shape) {
  const std::size_t n = traj.size();
  VoltageRamp d(traj.t.back(), n, model.size());
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < model.size(); ++i)
      d(k, i) = -shape[k] * p.p2[k] * model.electrode(i).eval(traj.x[k]).d1;
  return d;
}

namespace {

struct Sweep {
  VoltageRamp ramp;
  double max_du = 0.0;
};

// Forward sweep with immediate update: the control at t_k is revised
// from the new state before stepping, and the step end uses the old
// next sample shifted by the same increment.
Sweep krotov_sweep(const PotentialModel& model, const VoltageRamp& old,
                   const CostateVector& p, std::span<const double> shape,
                   double lambda, double x0) {
  const std::size_t n = old.samples(), ch = old.channels();
  Sweep s{old, 0.0};
  VoltageRamp& next = s.ramp;
  std::vector<double> du(ch), pred(ch), mid(ch);
  double x = x0, v = 0.0;
  auto update = [&](std::size_t k) {
    for (std::size_t i = 0; i < ch; ++i) {
      du[i] = -(shape[k] / lambda) * p.p2[k] * model.electrode(i).eval(x).d1;
      next(k, i) = next.clamp_value(old(k, i) + du[i]);
      s.max_du = std::max(s.max_du, std::abs(next(k, i) - old(k, i)));
    }
  };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    update(k);
    for (std::size_t i = 0; i < ch; ++i) {
      pred[i] = next.clamp_value(old(k + 1, i) + du[i]);
      mid[i] = 0.5 * (next(k, i) + pred[i]);
    }
    rk4_step(model, next.row(k), mid, pred, old.dt(), x, v);
    if (!std::isfinite(x) || !model.window().contains(x))
      throw EscapeError(old.time(k + 1), x);
  }
  update(n - 1);
  return s;
}

}  // namespace

OptimizationReport optimize_classical(const PotentialModel& model,
                                      const VoltageRamp& guess,
                                      const OptimizationConfig& cfg) {
  if (!(cfg.omega > 0.0)) fail(ErrorKind::config, "omega must be positive");
  const std::vector<double> shape = resolve_shape(cfg, guess.samples());
  OptimizationReport rep;
  rep.ramp = guess;
  if (std::isfinite(cfg.u_max)) rep.ramp.clamp(cfg.u_max);

  auto evaluate = [&](const VoltageRamp& r) {
    return propagate_classical(model, r, cfg.x_start, 0.0, Integrator::rk4);
  };
  ClassicalTrajectory traj = evaluate(rep.ramp);
  double J = classical_functional(traj, model, cfg);
  double n_ph = final_energy(traj, model.mass(), cfg.omega, cfg.x_target).phonons;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double lambda = cfg.lambda_a;
  if (!(lambda > 0.0)) {
    const CostateVector p = costate_backward(model, rep.ramp, traj, cfg);
    const double peak = krotov_direction(model, traj, p, shape).max_abs();
    lambda = peak > 0.0 ? peak / cfg.initial_step : 1.0;
  }
  rep.history.push_back({0, J, n_ph, nan, 0.0, lambda, true});

  int rejections = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (n_ph < cfg.target_phonons) break;
    const CostateVector p = costate_backward(model, rep.ramp, traj, cfg);
    bool accepted = false;
    Sweep sw;
    ClassicalTrajectory trial;
    double J_new = std::numeric_limits<double>::infinity();
    try {
      sw = krotov_sweep(model, rep.ramp, p, shape, lambda, cfg.x_start);
      trial = evaluate(sw.ramp);
      J_new = classical_functional(trial, model, cfg);
      accepted = J_new <= J;
    } catch (const EscapeError&) {
      accepted = false;
    }
    if (accepted) {
      const double ratio = J > 0.0 ? std::sqrt(J_new / J) : 1.0;
      rep.ramp = std::move(sw.ramp);
      traj = std::move(trial);
      J = J_new;
      n_ph = final_energy(traj, model.mass(), cfg.omega, cfg.x_target).phonons;
      rejections = 0;
      rep.history.push_back({it, J, n_ph, nan, sw.max_du, lambda, true});
      lambda *= cfg.lambda_shrink * (cfg.lambda_tracks_functional ? ratio : 1.0);
    } else {
      rep.history.push_back({it, J_new, nan, nan, sw.max_du, lambda, false});
      lambda *= 2.0;
      if (++rejections > cfg.max_rejections)
        fail(ErrorKind::divergence,
             "functional failed to decrease for more than " +
                 std::to_string(cfg.max_rejections) +
                 " consecutive iterations; increase lambda_a");
    }
  }
  rep.final_J = J;
  rep.final_phonons = n_ph;
  rep.converged = n_ph < cfg.target_phonons;
  return rep;
}

std::string report_json(const OptimizationReport& report,
                        const std::string& config_echo) {
  using nlohmann::json;
  auto num = [](double v) -> json {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  json hist = json::array();
  for (const auto& r : report.history)
    hist.push_back({{"iteration", r.iteration},
                    {"J", num(r.J)},
                    {"excitation_phonons", num(r.energy_phonons)},
                    {"fidelity", num(r.fidelity)},
                    {"max_delta_u_V", num(r.max_delta_u)},
                    {"lambda_a", num(r.lambda_a)},
                    {"accepted", r.accepted}});
  json j{{"converged", report.converged},
         {"final_J", num(report.final_J)},
         {"final_excitation_phonons", num(report.final_phonons)},
         {"final_fidelity", num(report.final_fidelity)},
         {"iterations", hist},
         {"config", json::parse(config_echo)}};
  return j.dump(2) + "\n";
}

}  // namespace shuttle
