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

#include "shuttle/analytic_ctrl.hpp"

#include <algorithm>
#include <cmath>

#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

double BangBangSolution::acceleration() const {
  // half the distance covered in half the time
  return 4.0 * (x2 - x1) / (t_min * t_min);
}

double BangBangSolution::position(double t) const {
  const double a = acceleration();
  if (t <= t_sw) return x1 + 0.5 * a * t * t;
  const double r = t_min - t;
  return x2 - 0.5 * a * r * r;
}

double BangBangSolution::velocity(double t) const {
  const double a = acceleration();
  return t <= t_sw ? a * t : a * (t_min - t);
}

void BangBangSolution::control(double t, std::span<double> volts) const {
  const double s = t < t_sw ? u_max : -u_max;
  volts[0] = s;
  volts[1] = -s;
}

BangBangSolution bangbang_solution(double omega0, double u_max, double x1,
                                   double x2) {
  if (!(u_max > 0.0)) fail(ErrorKind::domain, "u_max must be positive");
  if (!(omega0 > 0.0)) fail(ErrorKind::domain, "omega0 must be positive");
  BangBangSolution s;
  s.t_min = std::sqrt(2.0) / (omega0 * std::sqrt(u_max));
  s.t_sw = s.t_min / 2.0;
  s.u_max = u_max;
  s.omega0 = omega0;
  s.x1 = x1;
  s.x2 = x2;
  return s;
}

BangBang bangbang(double omega0, double u_max, double x1, double x2,
                  std::size_t samples) {
  BangBang out{bangbang_solution(omega0, u_max, x1, x2), {}};
  const BangBangSolution& s = out.solution;
  VoltageRamp r(s.t_min, samples, 2);
  const auto snap = static_cast<std::size_t>(std::llround(s.t_sw / r.dt()));
  for (std::size_t k = 0; k < samples; ++k) {
    const double u = k < snap ? u_max : -u_max;
    r(k, 0) = u;
    r(k, 1) = -u;
  }
  out.ramp = std::move(r);
  return out;
}

PotentialModel bangbang_model(double omega0, double x1, double x2,
                              double mass) {
  HarmonicGeometry g;
  g.mass = mass;
  g.x1 = x1;
  g.spacing = x2 - x1;
  g.omega0 = std::sqrt(2.0) * omega0;
  return make_harmonic_model(g);
}

namespace {

struct IEASample {
  double base[2];
  double comp[2];
};

IEASample iea_sample(const PotentialModel& model, const TransportFunction& tf,
                     double omega, double t) {
  const double alpha = tf.position(t);
  const double acc = tf.acceleration(t);
  const WellSolve w = well_solve(model, alpha);
  const double q = units::volt_energy;
  const double m = model.mass();
  const double k = m * omega * omega / q;
  const double f = m * acc / q;
  IEASample s;
  s.base[0] = -k * w.phi2.d1 / w.denominator;
  s.base[1] = k * w.phi1.d1 / w.denominator;
  s.comp[0] = -f * w.phi2.d2 / w.denominator;
  s.comp[1] = f * w.phi1.d2 / w.denominator;
  return s;
}

// Invariant with rho = 1 and Omega = Omega_0 = 0: the Ermakov constraint
// rho'' + Omega^2 rho = Omega_0^2 / rho^3 holds identically.
constexpr bool ermakov_trivial(double rho, double omega_inv, double omega_0) {
  return omega_inv * omega_inv * rho == omega_0 * omega_0 / (rho * rho * rho);
}
static_assert(ermakov_trivial(1.0, 0.0, 0.0));

void verify_identities(const PotentialModel& model, const TransportFunction& tf,
                       double omega, double t, std::span<const double> u) {
  const double alpha = tf.position(t);
  const double q = units::volt_energy;
  const double m = model.mass();
  double force = 0.0, curv = 0.0, fscale = 0.0, cscale = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const Jet p = model.electrode(i).eval(alpha);
    force += -q * p.d1 * u[i];
    curv += q * p.d2 * u[i];
    fscale += std::abs(q * p.d1 * u[i]);
    cscale += std::abs(q * p.d2 * u[i]);
  }
  const double want_f = m * tf.acceleration(t);
  const double want_c = m * omega * omega;
  const double tol = 1e-8;
  if (std::abs(force - want_f) > tol * std::max({std::abs(want_f), fscale, 1e-300}) ||
      std::abs(curv - want_c) > tol * std::max({want_c, cscale, 1e-300}))
    fail(ErrorKind::degenerate_geometry,
         "compensation voltages fail the force/curvature identities");
}

}  // namespace

IEARamp iea_ramp(const PotentialModel& model, const TransportFunction& tf,
                 double omega, std::size_t samples) {
  if (model.size() != 2)
    fail(ErrorKind::domain, "inverse engineering needs exactly two electrodes");
  check_denominators(model, tf, samples);
  IEARamp r;
  r.base = VoltageRamp(tf.duration(), samples, 2);
  r.compensation = r.base;
  r.total = r.base;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = r.base.time(k);
    const IEASample s = iea_sample(model, tf, omega, t);
    for (std::size_t i = 0; i < 2; ++i) {
      r.base(k, i) = s.base[i];
      r.compensation(k, i) = s.comp[i];
      r.total(k, i) = s.base[i] + s.comp[i];
    }
    verify_identities(model, tf, omega, t, r.total.row(k));
  }
  r.max_abs = r.total.max_abs();
  return r;
}

std::array<double, 2> iea_compensation(const PotentialModel& model,
                                       const TransportFunction& tf, double t) {
  const IEASample s = iea_sample(model, tf, 0.0, t);
  return {s.comp[0], s.comp[1]};
}

ControlFunction iea_control(const PotentialModel& model,
                            const TransportFunction& tf, double omega) {
  if (model.size() != 2)
    fail(ErrorKind::domain, "inverse engineering needs exactly two electrodes");
  return [&model, tf, omega](double t, std::span<double> out) {
    const IEASample s = iea_sample(model, tf, omega, t);
    out[0] = s.base[0] + s.comp[0];
    out[1] = s.base[1] + s.comp[1];
  };
}

namespace {

double iea_peak(const PotentialModel& model, const TransportFunction& tf,
                double omega, std::size_t samples) {
  double peak = 0.0;
  const double dt = tf.duration() / static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const IEASample s = iea_sample(model, tf, omega, k * dt);
    for (int i = 0; i < 2; ++i)
      peak = std::max(peak, std::abs(s.base[i] + s.comp[i]));
  }
  return peak;
}

}  // namespace

std::vector<TminPoint> iea_tmin_scan(const PotentialModel& model, double omega,
                                     const std::vector<double>& u_max,
                                     const TransportFunction& family,
                                     std::size_t samples, double resolution) {
  if (model.size() != 2)
    fail(ErrorKind::domain, "inverse engineering needs exactly two electrodes");
  check_denominators(model, family, samples);
  std::vector<TminPoint> out;
  for (const double u : u_max) {
    if (!(u > 0.0)) fail(ErrorKind::domain, "u_max values must be positive");
    auto fits = [&](double T) {
      return iea_peak(model, family.with_duration(T), omega, samples) <= u;
    };
    double hi = family.duration();
    double lo = hi;
    int guard = 0;
    while (!fits(hi)) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 60)
        fail(ErrorKind::domain, "base well alone exceeds the voltage bound");
    }
    if (lo == hi) {
      do {
        hi = lo;
        lo *= 0.5;
      } while (fits(lo) && lo > resolution);
    }
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? hi : lo) = mid;
    }
    out.push_back({u, hi});
  }
  return out;
}

void write_scan_csv(const std::string& path, const std::vector<TminPoint>& scan) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : scan) rows.push_back({p.u_max, p.t_min});
  csv::write(path, {"umax_V", "tmin_us"}, rows);
}

}  // namespace shuttle
