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

#include "shuttle/quantum_oct.hpp"

#include <algorithm>
#include <cmath>

#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

using units::hbar;

namespace {

// <chi| phi - phi(X) |psi> in the shared frame, phases included. The
// c-number phi(X) contributes phi(X) Im<chi|psi>, which vanishes on the
// trajectory that produced chi (<chi|psi> = F is real). In the sequential
// sweep it would only feed the global phase that the update itself
// imprints on psi back into the next update.
cplx element(const MovingWavefunction& chi, const MovingWavefunction& psi,
             const ElectrodePotential& e, const FourierGrid& grid) {
  const auto& y = grid.y();
  cplx s = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j)
    s += std::conj(chi.psi[j]) * psi.psi[j] *
         e.difference(psi.x_cl + y[j], psi.x_cl);
  const double a = psi.phase - chi.phase;
  return s * psi.dx() * cplx(std::cos(a), std::sin(a));
}

void sample_linear(const VoltageRamp& r, std::size_t k, double w,
                   std::vector<double>& out) {
  out.resize(r.channels());
  for (std::size_t i = 0; i < r.channels(); ++i)
    out[i] = r(k, i) + w * (r(k + 1, i) - r(k, i));
}

// chi(t_k) on the ramp grid, propagated back through the schedule with
// the ramp that produced it.
std::vector<MovingWavefunction> costate_backward(
    QuantumStepper& st, const VoltageRamp& ramp, const QuantumResult& fwd,
    const MovingWavefunction& target, cplx* tau_out) {
  const MovingWavefunction& psi_t = fwd.final_state;
  bool disjoint = false;
  std::vector<cplx> g = to_frame(target, psi_t, st.grid(), &disjoint);
  cplx ov = 0.0;  // <tgt|psi(T)>
  for (std::size_t j = 0; j < g.size(); ++j) ov += std::conj(g[j]) * psi_t.psi[j];
  ov *= psi_t.dx();
  if (tau_out) *tau_out = ov;
  MovingWavefunction chi = psi_t;
  for (std::size_t j = 0; j < g.size(); ++j) chi.psi[j] = ov * g[j];

  const std::size_t n = ramp.samples();
  const std::size_t sub = fwd.schedule.substeps;
  const double h = ramp.dt() / static_cast<double>(sub);
  std::vector<MovingWavefunction> out(n);
  out[n - 1] = chi;
  std::vector<double> um;
  for (std::size_t k = n - 1; k-- > 0;) {
    for (std::size_t s = sub; s-- > 0;) {
      sample_linear(ramp, k, (s + 0.5) / sub, um);
      scheduled_backward(st, chi, fwd.schedule, k * sub + s, um, h);
    }
    chi.t = ramp.time(k);
    out[k] = chi;
  }
  return out;
}

QuantumOptions forward_options(QuantumOptions o) {
  o.record_states = true;
  o.record_observables = false;
  return o;
}

}  // namespace

QuantumGradient quantum_gradient(const PotentialModel& model,
                                 const VoltageRamp& ramp,
                                 const MovingWavefunction& psi0,
                                 const MovingWavefunction& target,
                                 const QuantumOptions& opts) {
  QuantumGradient out{0.0, 0.0, VoltageRamp(ramp.duration(), ramp.samples(),
                                            ramp.channels()),
                      propagate_quantum(model, ramp, psi0, forward_options(opts))};
  QuantumStepper st(model, psi0.size(), psi0.width, opts.cheb_tolerance);
  const auto chi = costate_backward(st, ramp, out.forward, target, &out.tau);
  out.fidelity = std::norm(out.tau);
  const auto& psi = out.forward.states;
  for (std::size_t k = 0; k < ramp.samples(); ++k)
    for (std::size_t i = 0; i < ramp.channels(); ++i)
      out.g(k, i) = element(chi[k], psi[k], model.electrode(i), st.grid()).imag();
  return out;
}

double predicted_fidelity_change(const QuantumGradient& grad,
                                 const VoltageRamp& delta) {
  const VoltageRamp& g = grad.g;
  double s = 0.0;
  for (std::size_t k = 0; k < g.samples(); ++k) {
    double v = 0.0;
    for (std::size_t i = 0; i < g.channels(); ++i) v += g(k, i) * delta(k, i);
    s += (k == 0 || k + 1 == g.samples()) ? 0.5 * v : v;
  }
  return 2.0 * units::volt_energy / hbar * s * g.dt();
}

namespace {

struct QuantumSweep {
  VoltageRamp ramp;
  double max_du = 0.0;
};

QuantumSweep krotov_sweep(QuantumStepper& st, const VoltageRamp& old,
                          const QuantumResult& fwd,
                          const std::vector<MovingWavefunction>& chi,
                          const MovingWavefunction& psi0,
                          std::span<const double> shape, double lambda,
                          double u_max) {
  const PotentialModel& model = st.model();
  const std::size_t n = old.samples(), nc = old.channels();
  const std::size_t sub = fwd.schedule.substeps;
  const double h = old.dt() / static_cast<double>(sub);
  QuantumSweep out{old, 0.0};
  VoltageRamp& r = out.ramp;
  auto clampv = [&](double v) { return std::clamp(v, -u_max, u_max); };
  MovingWavefunction psi = psi0;
  std::vector<double> next(nc), um(nc);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < nc; ++i) {
      const double g = element(chi[k], psi, model.electrode(i), st.grid()).imag();
      const double u = clampv(old(k, i) + shape[k] / lambda * g);
      out.max_du = std::max(out.max_du, std::abs(u - old(k, i)));
      r(k, i) = u;
    }
    if (k + 1 == n) break;
    for (std::size_t i = 0; i < nc; ++i)
      next[i] = clampv(old(k + 1, i) + (r(k, i) - old(k, i)));
    for (std::size_t s = 0; s < sub; ++s) {
      const double w = (s + 0.5) / sub;
      for (std::size_t i = 0; i < nc; ++i) um[i] = r(k, i) + w * (next[i] - r(k, i));
      scheduled_forward(st, psi, fwd.schedule, k * sub + s, um, h);
    }
  }
  return out;
}

}  // namespace

OptimizationReport optimize_quantum(const PotentialModel& model,
                                    const VoltageRamp& guess,
                                    const MovingWavefunction& psi0,
                                    const MovingWavefunction& target,
                                    const QuantumOctConfig& cfg) {
  if (!(cfg.lambda_a > 0.0)) fail(ErrorKind::config, "lambda_a must be positive");
  const std::vector<double> shape =
      cfg.shape.empty() ? default_shape(guess.samples()) : cfg.shape;
  if (shape.size() != guess.samples())
    fail(ErrorKind::config, "update shape must match the ramp grid");
  const QuantumOptions opts = forward_options(cfg.propagation);
  QuantumStepper st(model, psi0.size(), psi0.width, opts.cheb_tolerance);

  OptimizationReport rep;
  rep.ramp = guess;
  if (std::isfinite(cfg.u_max)) rep.ramp.clamp(cfg.u_max);
  auto excitation = [&](const QuantumResult& q, const VoltageRamp& r) {
    if (!(cfg.omega > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return excitation_energy(q.final_state, model, r.row(r.samples() - 1),
                             cfg.omega);
  };
  QuantumResult fwd = propagate_quantum(model, rep.ramp, psi0, opts);
  double F = fidelity(fwd.final_state, target);
  if (!(F > 1e-6))
    fail(ErrorKind::guess_too_poor,
         "initial overlap with the target is below 1e-6; start from a "
         "classically optimized or inverse-engineered ramp");
  double J = 1.0 - F;
  double lambda = cfg.lambda_a;
  rep.history.push_back({0, J, excitation(fwd, rep.ramp), F, 0.0, lambda, true});

  int rejections = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (J < cfg.target_infidelity) break;
    const auto chi = costate_backward(st, rep.ramp, fwd, target, nullptr);
    QuantumSweep sw;
    QuantumResult trial;
    double F_new = std::numeric_limits<double>::quiet_NaN();
    bool ok = true;
    try {
      sw = krotov_sweep(st, rep.ramp, fwd, chi, psi0, shape, lambda, cfg.u_max);
      trial = propagate_quantum(model, sw.ramp, psi0, opts);
      F_new = fidelity(trial.final_state, target);
    } catch (const Error&) {
      if (!cfg.adaptive) throw;
      ok = false;
    }
    const double J_new = 1.0 - F_new;
    const bool accepted = ok && (!cfg.adaptive || J_new <= J);
    if (accepted) {
      rep.ramp = std::move(sw.ramp);
      fwd = std::move(trial);
      J = J_new;
      F = F_new;
      rejections = 0;
      rep.history.push_back({it, J, excitation(fwd, rep.ramp), F, sw.max_du,
                             lambda, true});
      lambda *= cfg.lambda_shrink;
    } else {
      rep.history.push_back({it, J_new, std::numeric_limits<double>::quiet_NaN(),
                             F_new, sw.max_du, lambda, false});
      lambda *= 2.0;
      if (++rejections > cfg.max_rejections)
        fail(ErrorKind::divergence,
             "infidelity failed to decrease for more than " +
                 std::to_string(cfg.max_rejections) +
                 " consecutive iterations; increase lambda_a");
    }
  }
  rep.final_J = J;
  rep.final_fidelity = F;
  rep.final_phonons = rep.history.back().accepted
                          ? rep.history.back().energy_phonons
                          : excitation(fwd, rep.ramp);
  rep.converged = J < cfg.target_infidelity;
  return rep;
}

namespace {

double sigma0(double omega, double mass) {
  return std::sqrt(hbar / (2.0 * mass * omega));
}

}  // namespace

PotentialModel make_xi_model(double xi, double omega, double mass) {
  if (!(xi > 0.0) || !(omega > 0.0))
    fail(ErrorKind::domain, "xi and omega must be positive");
  SurrogateGeometry g;
  const double d = sigma0(omega, mass) / xi;
  const double s = d / g.spacing;
  g.mass = mass;
  g.spacing = d;
  g.width *= s;
  g.height *= s;
  g.margin *= s;
  return make_surrogate_model(g);
}

double xi_voltage_scale(double xi, double omega, double mass) {
  const double s = sigma0(omega, mass) / xi / SurrogateGeometry{}.spacing;
  return s * s;
}

XiTask make_xi_task(double xi, double omega, const VoltageRamp& seed_280,
                    double u_max_280, const GridSpec& grid) {
  const double scale = xi_voltage_scale(xi, omega);
  XiTask t{xi, seed_280.duration(), u_max_280 * scale,
           make_xi_model(xi, omega), seed_280, {}, {}};
  for (std::size_t k = 0; k < t.seed.samples(); ++k)
    for (double& v : t.seed.row(k)) v *= scale;
  if (std::isfinite(t.u_max)) t.seed.clamp(t.u_max);
  const double d = t.model.spacing();
  const double x1 = t.model.electrode(0).center();
  t.psi0 = ground_state(t.model, t.seed.row(0), x1, grid);
  t.target = ground_state(t.model, t.seed.row(t.seed.samples() - 1), x1 + d, grid);
  return t;
}

double phase_space_volume(const PotentialModel& model, double omega) {
  const double d = model.spacing();
  const double h = 2.0 * units::pi * hbar;
  return model.mass() * d * d * omega / (2.0 * units::pi * h);
}

std::vector<ConvergencePoint> convergence_study(
    const std::vector<XiTask>& tasks, const std::vector<double>& lambdas,
    int iterations, int jobs) {
  const std::size_t nl = lambdas.size();
  const std::size_t total = tasks.size() * nl;
  std::vector<ConvergencePoint> out(total);
  const int threads = jobs > 0 ? jobs : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (std::size_t n = 0; n < total; ++n) {
    const XiTask& t = tasks[n / nl];
    const double lambda = lambdas[n % nl];
    ConvergencePoint p{t.xi, lambda, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), false};
    QuantumOctConfig cfg;
    cfg.lambda_a = lambda;
    cfg.max_iterations = iterations;
    cfg.target_infidelity = -1.0;
    cfg.u_max = t.u_max;
    cfg.adaptive = false;
    try {
      const OptimizationReport r =
          optimize_quantum(t.model, t.seed, t.psi0, t.target, cfg);
      const auto& h = r.history;
      for (std::size_t i = 1; i < h.size(); ++i)
        if (!std::isfinite(h[i].J) || h[i].J > h[i - 1].J) p.unstable = true;
      p.mean_dJ = (h.front().J - h.back().J) / static_cast<double>(iterations);
      p.final_fidelity = h.back().fidelity;
    } catch (const Error&) {
      p.unstable = true;
    }
    out[n] = p;
  }
  return out;
}

void write_study_csv(const std::string& path,
                     const std::vector<ConvergencePoint>& points) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : points)
    rows.push_back({p.xi, p.lambda_a, p.mean_dJ, p.final_fidelity,
                    p.unstable ? 1.0 : 0.0});
  csv::write(path, {"xi", "lambda_a", "mean_dJ", "final_fidelity", "unstable_flag"},
             rows);
}

double force_inhomogeneity(const PotentialModel& model, const IEARamp& ramp,
                           const TransportFunction& tf, double sigma0) {
  if (std::abs(ramp.total.duration() - tf.duration()) > 1e-12 * tf.duration())
    fail(ErrorKind::domain, "ramp and transport function durations differ");
  const double t = tf.peak_acceleration_time();
  const double alpha = tf.position(t);
  const double force = model.mass() * tf.acceleration(t);
  if (force == 0.0) fail(ErrorKind::undefined_ratio, "no acceleration to compare");
  const auto du = iea_compensation(model, tf, t);
  double spread = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const ElectrodePotential& e = model.electrode(i);
    spread += (e.eval(alpha + sigma0).d1 - e.eval(alpha - sigma0).d1) * du[i];
  }
  return units::volt_energy * spread / force;
}

}  // namespace shuttle
