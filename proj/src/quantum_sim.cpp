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

#include "shuttle/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shuttle/classical_sim.hpp"
#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

using units::hbar;

namespace {

// Frame phases run to ~1e9 rad over a 280 um transport. Wrapping every
// increment keeps a backward step the exact inverse of its forward step.
void add_phase(double& phase, double inc) {
  constexpr double two_pi = 2.0 * units::pi;
  phase = std::remainder(phase + std::remainder(inc, two_pi), two_pi);
}

}  // namespace

double MovingWavefunction::norm() const {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s * dx();
}

double potential_difference(const PotentialModel& model,
                            std::span<const double> volts, double x,
                            double x_ref) {
  double s = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (volts[i] != 0.0) s += volts[i] * model.electrode(i).difference(x, x_ref);
  return s * units::volt_energy;
}

QuantumStepper::QuantumStepper(const PotentialModel& model,
                               std::size_t points, double width,
                               double tolerance)
    : model_(&model), grid_(points, width), tol_(tolerance) {
  w_.assign(points, 0.0);
  kin_.resize(points);
  const double m = model.mass();
  for (std::size_t j = 0; j < points; ++j) {
    const double k = grid_.k()[j];
    kin_[j] = hbar * hbar * k * k / (2.0 * m);
  }
  for (auto* v : {&a_, &b_, &c_, &hb_, &acc_}) v->resize(points);
  bounds();
}

double QuantumStepper::set_potential(std::span<const double> volts,
                                     double x_frame, double force) {
  const auto& y = grid_.y();
  for (std::size_t j = 0; j < y.size(); ++j)
    w_[j] = potential_difference(*model_, volts, x_frame + y[j], x_frame) +
            force * y[j];
  bounds();
  return model_->potential_unchecked(volts, x_frame).value;
}

void QuantumStepper::bounds() {
  const auto [lo, hi] = std::minmax_element(w_.begin(), w_.end());
  const double kmax = *std::max_element(kin_.begin(), kin_.end());
  const double e0 = *lo, e1 = *hi + kmax;
  const double margin = 0.025 * (e1 - e0);
  e_min_ = e0 - margin;
  e_max_ = e1 + margin;
}

void QuantumStepper::apply(const std::vector<cplx>& in, std::vector<cplx>& out) {
  grid_.forward(in, hb_);
  for (std::size_t j = 0; j < hb_.size(); ++j) hb_[j] *= kin_[j];
  grid_.backward(hb_, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += w_[j] * in[j];
}

int QuantumStepper::propagate(std::vector<cplx>& psi, double dt,
                              double& phase) {
  const double half = 0.5 * (e_max_ - e_min_);
  const double mid = 0.5 * (e_max_ + e_min_);
  const double r = half * std::abs(dt) / hbar;
  const cplx unit = dt >= 0.0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  const std::size_t n = psi.size();
  // scaled H: (H - mid) / half
  auto apply_scaled = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    apply(in, out);
    for (std::size_t j = 0; j < n; ++j) out[j] = (out[j] - mid * in[j]) / half;
  };
  a_ = psi;
  apply_scaled(a_, b_);
  const double j0 = std::cyl_bessel_j(0.0, r);
  const cplx c1 = 2.0 * std::cyl_bessel_j(1.0, r) * unit;
  for (std::size_t j = 0; j < n; ++j) acc_[j] = j0 * a_[j] + c1 * b_[j];
  cplx ipow = unit;
  int terms = 2;
  for (int order = 2;; ++order) {
    const double jn = std::cyl_bessel_j(static_cast<double>(order), r);
    if (order > r && std::abs(jn) < tol_) break;
    if (order > 100000)
      fail(ErrorKind::propagation_accuracy, "Chebyshev series did not converge");
    apply_scaled(b_, c_);
    ipow *= unit;
    const cplx coef = 2.0 * jn * ipow;
    for (std::size_t j = 0; j < n; ++j) {
      c_[j] = 2.0 * c_[j] - a_[j];
      acc_[j] += coef * c_[j];
    }
    std::swap(a_, b_);
    std::swap(b_, c_);
    ++terms;
  }
  psi = acc_;
  add_phase(phase, -mid * dt / hbar);
  return terms;
}

void QuantumStepper::relax(std::vector<cplx>& psi, double tau) {
  const double half = 0.5 * (e_max_ - e_min_);
  const double mid = 0.5 * (e_max_ + e_min_);
  const double r = std::min(half * tau / hbar, 50.0);
  const std::size_t n = psi.size();
  auto apply_scaled = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    apply(in, out);
    for (std::size_t j = 0; j < n; ++j) out[j] = (out[j] - mid * in[j]) / half;
  };
  // exp(-r x) = sum (2 - delta_n0) (-1)^n I_n(r) T_n(x); scaled by e^-r.
  auto coef = [&](int order) {
    return std::exp(-r) * std::cyl_bessel_i(static_cast<double>(order), r);
  };
  a_ = psi;
  apply_scaled(a_, b_);
  const double i0 = coef(0), i1 = -2.0 * coef(1);
  for (std::size_t j = 0; j < n; ++j) acc_[j] = i0 * a_[j] + i1 * b_[j];
  double sign = -1.0;
  for (int order = 2;; ++order) {
    const double in = coef(order);
    if (order > r && in < tol_ * 1e-3) break;
    apply_scaled(b_, c_);
    sign = -sign;
    const double cf = 2.0 * sign * in;
    for (std::size_t j = 0; j < n; ++j) {
      c_[j] = 2.0 * c_[j] - a_[j];
      acc_[j] += cf * c_[j];
    }
    std::swap(a_, b_);
    std::swap(b_, c_);
  }
  double s = 0.0;
  for (const auto& v : acc_) s += std::norm(v);
  const double scale = 1.0 / std::sqrt(s * grid_.dx());
  for (std::size_t j = 0; j < n; ++j) psi[j] = acc_[j] * scale;
}

double QuantumStepper::energy(const std::vector<cplx>& psi) {
  apply(psi, c_);
  cplx s = 0.0;
  double nrm = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    s += std::conj(psi[j]) * c_[j];
    nrm += std::norm(psi[j]);
  }
  return s.real() / nrm;
}

namespace {

struct LocalWell {
  double x;
  double omega;
  double sigma;
};

LocalWell local_well(const PotentialModel& model, std::span<const double> volts,
                     double center) {
  const double x = find_minimum(model, volts, center);
  const double k = eval_potential(model, volts, x).d2;
  const double w = std::sqrt(k / model.mass());
  return {x, w, std::sqrt(hbar / (2.0 * model.mass() * w))};
}

void check_grid(const GridSpec& g) {
  if (g.points < 32 || (g.points & (g.points - 1)) != 0)
    fail(ErrorKind::domain, "grid points must be a power of two >= 32");
}

MovingWavefunction hermite_state(const LocalWell& well, int n,
                                 std::size_t points, double width) {
  MovingWavefunction wf;
  wf.width = width;
  wf.x_cl = well.x;
  wf.psi.resize(points);
  const double h = width / static_cast<double>(points);
  // Normalized Hermite functions by the stable three-term recurrence in
  // u = y / (sqrt(2) sigma).
  const double s = std::sqrt(2.0) * well.sigma;
  for (std::size_t j = 0; j < points; ++j) {
    const double y = (static_cast<double>(j) - static_cast<double>(points / 2)) * h;
    const double u = y / s;
    double hm1 = 0.0;
    double h0 = std::pow(units::pi, -0.25) * std::exp(-0.5 * u * u);
    for (int k = 1; k <= n; ++k) {
      const double hk = std::sqrt(2.0 / k) * u * h0 - std::sqrt((k - 1.0) / k) * hm1;
      hm1 = h0;
      h0 = hk;
    }
    wf.psi[j] = h0 / std::sqrt(s);
  }
  const double nrm = std::sqrt(wf.norm());
  for (auto& v : wf.psi) v /= nrm;
  return wf;
}

}  // namespace

double default_window_width(const PotentialModel& model,
                            std::span<const double> volts, double center) {
  return 16.0 * local_well(model, volts, center).sigma;
}

MovingWavefunction oscillator_state(const PotentialModel& model,
                                    std::span<const double> volts,
                                    double center, int n, const GridSpec& grid) {
  check_grid(grid);
  const LocalWell well = local_well(model, volts, center);
  const double width = grid.width > 0.0 ? grid.width : 16.0 * well.sigma;
  return hermite_state(well, n, grid.points, width);
}

MovingWavefunction ground_state(const PotentialModel& model,
                                std::span<const double> volts, double center,
                                const GridSpec& grid) {
  check_grid(grid);
  const LocalWell well = local_well(model, volts, center);
  const double width = grid.width > 0.0 ? grid.width : 16.0 * well.sigma;
  MovingWavefunction wf = hermite_state(well, 0, grid.points, width);
  QuantumStepper st(model, grid.points, width);
  st.set_potential(volts, wf.x_cl, 0.0);
  const double unit = hbar * well.omega;
  const double tau = std::min(50.0 * hbar / (0.5 * st.spectral_range()),
                              2.0 / well.omega);
  double e = st.energy(wf.psi);
  for (int it = 0; it < 20000; ++it) {
    st.relax(wf.psi, tau);
    const double e_new = st.energy(wf.psi);
    const double change = std::abs(e_new - e);
    e = e_new;
    if (change < 1e-12 * unit) break;
  }
  // Center the window on the relaxed density.
  const Observables o = observe(wf, st.grid());
  const double shift = o.x_mean - wf.x_cl;
  if (std::abs(shift) > 1e-14 * width) {
    st.grid().translate(wf.psi, shift);
    wf.x_cl += shift;
  }
  return wf;
}

Observables observe(const MovingWavefunction& psi, const FourierGrid& grid) {
  const auto& y = grid.y();
  const std::size_t n = psi.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::norm(psi.psi[j]);
    s0 += p;
    s1 += p * y[j];
    s2 += p * y[j] * y[j];
  }
  std::vector<cplx> phi(n);
  grid.forward(psi.psi, phi);
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::norm(phi[j]);
    const double k = grid.k()[j];
    q0 += p;
    q1 += p * k;
    q2 += p * k * k;
  }
  const double ym = s1 / s0, km = q1 / q0;
  const double dx = std::sqrt(std::max(0.0, s2 / s0 - ym * ym));
  const double dp = hbar * std::sqrt(std::max(0.0, q2 / q0 - km * km));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {psi.t, psi.x_cl + ym, psi.p_cl + hbar * km, dx, dp, dx * dp / hbar,
          nan};
}

namespace {

// In-window means used for the frame shift.
std::pair<double, double> window_means(const std::vector<cplx>& psi,
                                       const FourierGrid& grid) {
  MovingWavefunction tmp;
  tmp.psi = psi;
  tmp.width = grid.width();
  const Observables o = observe(tmp, grid);
  return {o.x_mean, o.p_mean};
}

void apply_shift(MovingWavefunction& psi, const FourierGrid& grid, double dx,
                 double dp) {
  grid.translate(psi.psi, dx);
  if (dp != 0.0) {
    const auto& y = grid.y();
    for (std::size_t j = 0; j < psi.size(); ++j) {
      const double a = -dp * y[j] / hbar;
      psi.psi[j] *= cplx(std::cos(a), std::sin(a));
    }
  }
  add_phase(psi.phase, psi.p_cl * dx / hbar);
  psi.x_cl += dx;
  psi.p_cl += dp;
}

void undo_shift(MovingWavefunction& psi, const FourierGrid& grid, double dx,
                double dp) {
  psi.x_cl -= dx;
  psi.p_cl -= dp;
  add_phase(psi.phase, -psi.p_cl * dx / hbar);
  if (dp != 0.0) {
    const auto& y = grid.y();
    for (std::size_t j = 0; j < psi.size(); ++j) {
      const double a = dp * y[j] / hbar;
      psi.psi[j] *= cplx(std::cos(a), std::sin(a));
    }
  }
  grid.translate(psi.psi, -dx);
}

double instantaneous_excitation(const MovingWavefunction& psi,
                                const PotentialModel& model,
                                std::span<const double> volts, double omega) {
  try {
    return excitation_energy(psi, model, volts, omega);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

void scheduled_forward(QuantumStepper& st, MovingWavefunction& psi,
                       const FrameSchedule& schedule, std::size_t j,
                       std::span<const double> u_mid, double dt) {
  const FrameStep& s = schedule.steps[j];
  const double vx = st.set_potential(u_mid, s.x_mid, s.force_mid);
  st.propagate(psi.psi, dt, psi.phase);
  const double m = st.model().mass();
  add_phase(psi.phase, (s.p_mid * s.p_mid / (2.0 * m) - vx) * dt / hbar);
  psi.x_cl = s.x_end;
  psi.p_cl = s.p_end;
  apply_shift(psi, st.grid(), s.shift_x, s.shift_p);
  psi.t += dt;
}

void scheduled_backward(QuantumStepper& st, MovingWavefunction& psi,
                        const FrameSchedule& schedule, std::size_t j,
                        std::span<const double> u_mid, double dt) {
  const FrameStep& s = schedule.steps[j];
  undo_shift(psi, st.grid(), s.shift_x, s.shift_p);
  const double vx = st.set_potential(u_mid, s.x_mid, s.force_mid);
  const double m = st.model().mass();
  add_phase(psi.phase, -(s.p_mid * s.p_mid / (2.0 * m) - vx) * dt / hbar);
  st.propagate(psi.psi, -dt, psi.phase);
  psi.x_cl = schedule.x_start(j);
  psi.p_cl = schedule.p_start(j);
  psi.t -= dt;
}

namespace {

// Voltages at fraction w of step interval k. The ramp overload and the
// backward sweeps in quantum_oct evaluate identical (k, w) pairs, so the
// frame phase (~1e7 rad per step) is reproduced bit for bit.
using StepControl = std::function<void(std::size_t, double, std::span<double>)>;

QuantumResult propagate_impl(const PotentialModel& model,
                             const StepControl& at, double duration,
                             std::size_t steps, const MovingWavefunction& psi0,
                             const QuantumOptions& opts) {
  if (steps == 0 || !(duration > 0.0))
    fail(ErrorKind::domain, "need a positive duration and at least one step");
  if (opts.substeps == 0) fail(ErrorKind::domain, "substeps must be >= 1");
  const double n0 = psi0.norm();
  if (std::abs(n0 - 1.0) > 1e-10)
    fail(ErrorKind::domain, "initial wavefunction is not normalized");
  QuantumStepper st(model, psi0.size(), psi0.width, opts.cheb_tolerance);
  const FourierGrid& grid = st.grid();
  const double m = model.mass();
  const double limit = psi0.width / 12.0;

  QuantumResult res;
  MovingWavefunction psi = psi0;
  psi.t = 0.0;
  if (!opts.moving && psi.p_cl != 0.0)
    fail(ErrorKind::domain, "static-grid propagation needs p_cl = 0");
  res.schedule.x0 = psi.x_cl;
  res.schedule.p0 = psi.p_cl;
  res.schedule.substeps = opts.substeps;
  res.schedule.steps.reserve(steps * opts.substeps);

  const std::size_t nc = model.size();
  std::vector<double> ua(nc), uq1(nc), um(nc), uq3(nc), ub(nc);
  const double big = duration / static_cast<double>(steps);
  auto time_of = [&](std::size_t k) { return k == steps ? duration : k * big; };
  auto record = [&]() {
    if (opts.record_observables) {
      Observables o = observe(psi, grid);
      if (o.dx > limit) {
        std::ostringstream ss;
        ss << "wavepacket width " << o.dx << " um exceeds L/12 at t=" << psi.t;
        fail(ErrorKind::grid_too_small, ss.str());
      }
      if (opts.omega > 0.0)
        o.excitation =
            instantaneous_excitation(psi, model, ua, opts.omega);
      res.series.push_back(o);
    }
    if (opts.record_states) res.states.push_back(psi);
  };
  at(0, 0.0, ua);
  record();

  const double h = big / static_cast<double>(opts.substeps);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t sub = 0; sub < opts.substeps; ++sub) {
      const double S = static_cast<double>(opts.substeps);
      at(k, sub / S, ua);
      at(k, (sub + 0.5) / S, um);
      at(k, (sub + 1.0) / S, ub);
      FrameStep s{};
      if (opts.moving) {
        at(k, (sub + 0.25) / S, uq1);
        at(k, (sub + 0.75) / S, uq3);
        double x = psi.x_cl, v = psi.p_cl / m;
        rk4_step(model, ua, uq1, um, 0.5 * h, x, v);
        s.x_mid = x;
        s.p_mid = m * v;
        rk4_step(model, um, uq3, ub, 0.5 * h, x, v);
        s.x_end = x;
        s.p_end = m * v;
        if (!model.window().contains(x)) throw EscapeError(psi.t + h, x);
        s.force_mid = m * acceleration(model, um, s.x_mid);
      } else {
        s.x_mid = s.x_end = psi.x_cl;
      }
      const double vx = st.set_potential(um, s.x_mid, s.force_mid);
      st.propagate(psi.psi, h, psi.phase);
      add_phase(psi.phase, (s.p_mid * s.p_mid / (2.0 * m) - vx) * h / hbar);
      const double drift = std::abs(psi.norm() - 1.0);
      res.max_norm_drift = std::max(res.max_norm_drift, drift);
      if (drift > opts.norm_tolerance)
        fail(ErrorKind::propagation_accuracy, "norm drift exceeds tolerance");
      psi.x_cl = s.x_end;
      psi.p_cl = s.p_end;
      psi.t += h;
      if (opts.moving) {
        const auto [xm, pm] = window_means(psi.psi, grid);
        s.shift_x = xm;
        s.shift_p = pm;
        apply_shift(psi, grid, xm, pm);
      }
      res.schedule.steps.push_back(s);
    }
    psi.t = time_of(k + 1);
    at(k, 1.0, ua);
    record();
  }
  res.final_state = psi;
  return res;
}

}  // namespace

QuantumResult propagate_quantum(const PotentialModel& model,
                                const ControlFunction& control,
                                double duration, std::size_t steps,
                                const MovingWavefunction& psi0,
                                const QuantumOptions& opts) {
  const double big = duration / static_cast<double>(steps);
  StepControl at = [&](std::size_t k, double w, std::span<double> out) {
    control(k + 1 == steps && w == 1.0 ? duration : (k + w) * big, out);
  };
  return propagate_impl(model, at, duration, steps, psi0, opts);
}

QuantumResult propagate_quantum(const PotentialModel& model,
                                const VoltageRamp& ramp,
                                const MovingWavefunction& psi0,
                                const QuantumOptions& opts) {
  if (ramp.channels() != model.size())
    fail(ErrorKind::domain, "ramp channel count does not match the model");
  // piecewise-linear interpolation; exact sample rows at the knots
  StepControl at = [&](std::size_t k, double w, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = ramp(k, i) + w * (ramp(k + 1, i) - ramp(k, i));
  };
  return propagate_impl(model, at, ramp.duration(), ramp.samples() - 1, psi0,
                        opts);
}

QuantumResult evolve_static(const PotentialModel& model,
                            std::span<const double> volts,
                            const MovingWavefunction& psi0, double duration,
                            std::size_t steps, const QuantumOptions& opts) {
  VoltageRamp r(duration, steps + 1, model.size());
  for (std::size_t k = 0; k <= steps; ++k)
    for (std::size_t i = 0; i < model.size(); ++i) r(k, i) = volts[i];
  return propagate_quantum(model, r, psi0, opts);
}

std::vector<cplx> to_frame(const MovingWavefunction& target,
                           const MovingWavefunction& psi,
                           const FourierGrid& grid, bool* disjoint) {
  if (target.size() != psi.size() ||
      std::abs(target.width - psi.width) > 1e-12 * psi.width)
    fail(ErrorKind::domain, "wavefunctions live on different window grids");
  const double shift = psi.x_cl - target.x_cl;
  std::vector<cplx> g(psi.size(), cplx(0.0));
  if (std::abs(shift) >= 0.5 * psi.width) {
    if (disjoint) *disjoint = true;
    return g;
  }
  if (disjoint) *disjoint = false;
  g = target.psi;
  grid.translate(g, shift);
  // target(x) at x = y + X, re-expressed in psi's phase convention.
  const auto& y = grid.y();
  const double dp = target.p_cl - psi.p_cl;
  const double c = target.phase - psi.phase + target.p_cl * shift / hbar;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double a = c + dp * y[j] / hbar;
    g[j] *= cplx(std::cos(a), std::sin(a));
  }
  return g;
}

Overlap overlap(const MovingWavefunction& psi,
                const MovingWavefunction& target) {
  FourierGrid grid(psi.size(), psi.width);
  bool disjoint = false;
  const std::vector<cplx> g = to_frame(target, psi, grid, &disjoint);
  cplx s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += std::conj(psi.psi[j]) * g[j];
  return {s * psi.dx(), disjoint};
}

double fidelity(const MovingWavefunction& psi,
                const MovingWavefunction& target) {
  return std::norm(overlap(psi, target).value);
}

double excitation_energy(const MovingWavefunction& psi,
                         const PotentialModel& model,
                         std::span<const double> volts, double omega) {
  FourierGrid grid(psi.size(), psi.width);
  const Observables o = observe(psi, grid);
  const double x_min = find_minimum(model, volts, o.x_mean);
  const auto& y = grid.y();
  double pot = 0.0, nrm = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double p = std::norm(psi.psi[j]);
    nrm += p;
    pot += p * potential_difference(model, volts, psi.x_cl + y[j], x_min);
  }
  pot /= nrm;
  // <(P + hbar k)^2> / 2m from the window momentum moments.
  const double pm = o.p_mean - psi.p_cl;
  const double p2 = o.dp * o.dp + pm * pm;
  const double P = psi.p_cl;
  const double kinetic = (P * P + 2.0 * P * pm + p2) / (2.0 * model.mass());
  const double unit = hbar * omega;
  return (kinetic + pot - 0.5 * unit) / unit;
}

WellDiagnostics final_well_diagnostics(const MovingWavefunction& psi,
                                       const PotentialModel& model,
                                       std::span<const double> volts,
                                       double omega, std::size_t steps) {
  QuantumOptions o;
  o.record_states = true;
  const double period = 2.0 * units::pi / omega;
  const QuantumResult r = evolve_static(model, volts, psi, period, steps, o);
  // The dip of dx dp is narrow for a strongly squeezed state, so the
  // coarse minimum is refined on the two sample intervals around it.
  auto argmin = [](const QuantumResult& q) {
    std::size_t j = 0;
    for (std::size_t i = 1; i < q.series.size(); ++i)
      if (q.series[i].uncertainty < q.series[j].uncertainty) j = i;
    return j;
  };
  std::size_t j = argmin(r);
  double umin = r.series[j].uncertainty;
  MovingWavefunction start = r.states[j > 0 ? j - 1 : 0];
  double span = 2.0 * period / static_cast<double>(steps);
  for (int level = 0; level < 2; ++level) {
    const std::size_t fine = 100;
    const QuantumResult q = evolve_static(model, volts, start, span, fine, o);
    const std::size_t jf = argmin(q);
    umin = std::min(umin, q.series[jf].uncertainty);
    start = q.states[jf > 0 ? jf - 1 : 0];
    span *= 2.0 / static_cast<double>(fine);
  }
  double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
  double xmin = pmin, xmax = 0.0;
  double psum = 0.0, xsum = 0.0;
  for (const auto& ob : r.series) {
    pmin = std::min(pmin, ob.dp);
    pmax = std::max(pmax, ob.dp);
    xmin = std::min(xmin, ob.dx);
    xmax = std::max(xmax, ob.dx);
    psum += ob.dp;
    xsum += ob.dx;
  }
  const double n = static_cast<double>(r.series.size());
  WellDiagnostics d;
  d.min_uncertainty = umin;
  d.dp_oscillation = (pmax - pmin) / (psum / n);
  d.dx_oscillation = (xmax - xmin) / (xsum / n);
  d.squeezed = d.dp_oscillation > 1e-2;
  return d;
}

void write_observables_csv(const std::string& path,
                           const std::vector<Observables>& series) {
  std::vector<std::vector<double>> rows;
  rows.reserve(series.size());
  for (const auto& o : series)
    rows.push_back({o.t, o.x_mean, o.p_mean, o.dx, o.dp, o.uncertainty,
                    o.excitation});
  csv::write(path,
             {"t_us", "x_mean_um", "p_mean", "dx_um", "dp",
              "uncert_product_hbar", "excitation_phonons"},
             rows);
}

}  // namespace shuttle
