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

#include "shuttle/trap_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

namespace {

// Coefficients of d/dt for a series in the full-c0 convention.
std::vector<double> differentiate(const std::vector<double>& c) {
  const std::size_t n = c.size();
  if (n < 2) return {0.0};
  std::vector<double> d(n - 1, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    d[k] = 2.0 * static_cast<double>(k + 1) * c[k + 1] +
           (k + 2 < n - 1 ? d[k + 2] : 0.0);
  }
  d[0] *= 0.5;
  return d;
}

double clenshaw(const std::vector<double>& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    double b0 = c[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

}  // namespace

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::vector<double> c)
    : lo_(lo), hi_(hi), c0_(std::move(c)) {
  if (!(hi_ > lo_) || c0_.empty())
    fail(ErrorKind::domain, "invalid Chebyshev series interval");
  const double scale = 2.0 / (hi_ - lo_);
  c1_ = differentiate(c0_);
  c2_ = differentiate(c1_);
  for (auto& v : c1_) v *= scale;
  for (auto& v : c2_) v *= scale * scale;
}

Jet ChebyshevSeries::eval(double x) const {
  const double t = (2.0 * x - (lo_ + hi_)) / (hi_ - lo_);
  return {clenshaw(c0_, t), clenshaw(c1_, t), clenshaw(c2_, t)};
}

ElectrodePotential ElectrodePotential::harmonic(double center,
                                                double curvature) {
  if (!(curvature > 0.0))
    fail(ErrorKind::domain, "harmonic curvature must be positive");
  return {center, HarmonicBackend{curvature}};
}

ElectrodePotential ElectrodePotential::surrogate(double center, double width,
                                                 double height) {
  if (!(width > 0.0) || !(height > 0.0))
    fail(ErrorKind::domain, "surrogate width and height must be positive");
  return {center, SurrogateBackend{width, height}};
}

ElectrodePotential ElectrodePotential::series(double center,
                                              ChebyshevSeries s) {
  return {center, SeriesBackend{std::move(s)}};
}

Jet ElectrodePotential::eval(double x) const {
  const double u = x - center_;
  if (auto* h = std::get_if<HarmonicBackend>(&backend_)) {
    return {-0.5 * h->curvature * u * u, -h->curvature * u, -h->curvature};
  }
  if (auto* s = std::get_if<SurrogateBackend>(&backend_)) {
    const double a = (u + 0.5 * s->width) / s->height;
    const double b = (u - 0.5 * s->width) / s->height;
    const double ia = 1.0 / (1.0 + a * a), ib = 1.0 / (1.0 + b * b);
    const double inv_pi = 1.0 / units::pi;
    return {inv_pi * (std::atan(a) - std::atan(b)),
            inv_pi / s->height * (ia - ib),
            inv_pi / (s->height * s->height) *
                (-2.0 * a * ia * ia + 2.0 * b * ib * ib)};
  }
  return std::get<SeriesBackend>(backend_).series.eval(x);
}

namespace {
// atan(u) - atan(v) via the subtraction formula when it is branch-safe.
double atan_difference(double u, double v) {
  const double den = 1.0 + u * v;
  if (den > 0.5) return std::atan((u - v) / den);
  return std::atan(u) - std::atan(v);
}
}  // namespace

double ElectrodePotential::difference(double x, double x_ref) const {
  if (auto* h = std::get_if<HarmonicBackend>(&backend_)) {
    return -0.5 * h->curvature * (x - x_ref) * (x + x_ref - 2.0 * center_);
  }
  if (auto* s = std::get_if<SurrogateBackend>(&backend_)) {
    const double u = x - center_, ur = x_ref - center_;
    const double hw = 0.5 * s->width, hh = s->height;
    return (atan_difference((u + hw) / hh, (ur + hw) / hh) -
            atan_difference((u - hw) / hh, (ur - hw) / hh)) /
           units::pi;
  }
  const auto& ser = std::get<SeriesBackend>(backend_).series;
  return ser.eval(x).value - ser.eval(x_ref).value;
}

PotentialModel::PotentialModel(std::vector<ElectrodePotential> electrodes,
                               double mass, Window window)
    : electrodes_(std::move(electrodes)), mass_(mass), window_(window) {
  if (electrodes_.size() < 2)
    fail(ErrorKind::domain, "a potential model needs at least 2 electrodes");
  for (std::size_t i = 1; i < electrodes_.size(); ++i)
    if (!(electrodes_[i].center() > electrodes_[i - 1].center()))
      fail(ErrorKind::domain, "electrode centers must be strictly increasing");
  if (!(mass_ > 0.0)) fail(ErrorKind::domain, "ion mass must be positive");
  if (!(window_.hi > window_.lo))
    fail(ErrorKind::domain, "empty working window");
}

double PotentialModel::spacing() const {
  return electrodes_[1].center() - electrodes_[0].center();
}

Jet PotentialModel::potential_unchecked(std::span<const double> volts,
                                        double x) const {
  Jet v;
  const std::size_t n = std::min(volts.size(), electrodes_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (volts[i] == 0.0) continue;
    const Jet p = electrodes_[i].eval(x);
    v.value += volts[i] * p.value;
    v.d1 += volts[i] * p.d1;
    v.d2 += volts[i] * p.d2;
  }
  v.value *= units::volt_energy;
  v.d1 *= units::volt_energy;
  v.d2 *= units::volt_energy;
  return v;
}

Jet eval_potential(const PotentialModel& model, std::span<const double> volts,
                   double x) {
  if (!model.window().contains(x)) {
    std::ostringstream ss;
    ss << "x=" << x << " um outside working window [" << model.window().lo
       << ", " << model.window().hi << "]";
    fail(ErrorKind::domain, ss.str());
  }
  if (volts.size() != model.size())
    fail(ErrorKind::domain, "voltage count does not match electrode count");
  return model.potential_unchecked(volts, x);
}

double calibrate_bias(const PotentialModel& model, std::size_t electrode,
                      double omega) {
  if (!(omega > 0.0))
    fail(ErrorKind::calibration, "target frequency must be positive");
  if (electrode >= model.size())
    fail(ErrorKind::calibration, "electrode index out of range");
  const ElectrodePotential& e = model.electrode(electrode);
  const double target = model.mass() * omega * omega;
  // V'' is linear in U, so the root of U*e*phi''(c) - m*omega^2 is one
  // secant step from U = 0; a Newton polish guards against rounding.
  const double k = units::volt_energy * e.eval(e.center()).d2;
  if (!(k < 0.0))
    fail(ErrorKind::calibration,
         "electrode curvature has no attractive sign for negative bias");
  double u = target / k;
  for (int it = 0; it < 3; ++it) {
    const double r = u * k - target;
    u -= r / k;
  }
  return u;
}

double find_minimum(const PotentialModel& model, std::span<const double> volts,
                    double guess) {
  double x = guess;
  for (int it = 0; it < 100; ++it) {
    const Jet v = eval_potential(model, volts, x);
    if (!(v.d2 > 0.0))
      fail(ErrorKind::no_minimum, "potential is not convex near x guess");
    double step = v.d1 / v.d2;
    const double cap = 0.05 * (model.window().hi - model.window().lo);
    step = std::clamp(step, -cap, cap);
    x -= step;
    if (!model.window().contains(x))
      fail(ErrorKind::no_minimum, "minimum search left the working window");
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(x))) return x;
  }
  fail(ErrorKind::no_minimum, "minimum search did not converge");
}

TabulatedFit fit_tabulated(std::span<const TabulatedSample> samples,
                           std::size_t degree) {
  const std::size_t n = samples.size();
  if (degree == 0) fail(ErrorKind::fit, "fit degree must be positive");
  if (n < 4 * degree)
    fail(ErrorKind::fit, "need at least 4*degree samples (have " +
                             std::to_string(n) + "); lower the degree");
  for (std::size_t i = 1; i < n; ++i)
    if (!(samples[i].x > samples[i - 1].x))
      fail(ErrorKind::fit, "sample positions must be strictly increasing");
  const double lo = samples.front().x, hi = samples.back().x;

  Eigen::MatrixXd a(n, degree + 1);
  Eigen::MatrixXd rhs(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (2.0 * samples[i].x - (lo + hi)) / (hi - lo);
    double tkm1 = 1.0, tk = t;
    a(i, 0) = 1.0;
    if (degree >= 1) a(i, 1) = t;
    for (std::size_t k = 2; k <= degree; ++k) {
      const double tn = 2.0 * t * tk - tkm1;
      tkm1 = tk;
      tk = tn;
      a(i, k) = tn;
    }
    rhs(i, 0) = samples[i].phi1;
    rhs(i, 1) = samples[i].phi2;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0
                          ? sv(0) / sv(sv.size() - 1)
                          : std::numeric_limits<double>::infinity();
  if (!(cond < kFitConditionLimit))
    fail(ErrorKind::fit, "ill-conditioned fit (condition " +
                             std::to_string(cond) + "); lower the degree");
  const Eigen::MatrixXd coef = svd.solve(rhs);

  auto make = [&](int col) {
    std::vector<double> c(degree + 1);
    for (std::size_t k = 0; k <= degree; ++k) c[k] = coef(k, col);
    ChebyshevSeries s(lo, hi, std::move(c));
    // Center: largest |phi| sample, refined to the stationary point.
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = col == 0 ? samples[i].phi1 : samples[i].phi2;
      const double b = col == 0 ? samples[best].phi1 : samples[best].phi2;
      if (std::abs(v) > std::abs(b)) best = i;
    }
    double xc = samples[best].x;
    for (int it = 0; it < 50; ++it) {
      const Jet j = s.eval(xc);
      if (j.d2 == 0.0) break;
      const double step = j.d1 / j.d2;
      const double next = xc - step;
      if (next < lo || next > hi) break;
      xc = next;
      if (std::abs(step) < 1e-12 * (1.0 + std::abs(xc))) break;
    }
    return std::pair{ElectrodePotential::series(xc, s), s};
  };
  auto [e1, s1] = make(0);
  auto [e2, s2] = make(1);

  double residual = 0.0;
  for (const auto& smp : samples) {
    residual = std::max(residual, std::abs(s1.eval(smp.x).value - smp.phi1));
    residual = std::max(residual, std::abs(s2.eval(smp.x).value - smp.phi2));
  }
  return {e1, e2, residual, cond};
}

std::vector<TabulatedSample> read_tabulated_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  if (t.header != std::vector<std::string>{"x_um", "phi1", "phi2"})
    fail(ErrorKind::config, path + ": expected header x_um,phi1,phi2");
  std::vector<TabulatedSample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[0], r[1], r[2]});
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i].x > out[i - 1].x))
      fail(ErrorKind::config, path + ": x must be strictly increasing");
  return out;
}

void write_tabulated_csv(const std::string& path,
                         std::span<const TabulatedSample> samples) {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back({s.x, s.phi1, s.phi2});
  csv::write(path, {"x_um", "phi1", "phi2"}, rows);
}

PotentialModel make_harmonic_model(const HarmonicGeometry& g) {
  const double kappa = g.mass * g.omega0 * g.omega0 / units::volt_energy;
  const double x2 = g.x1 + g.spacing;
  return PotentialModel({ElectrodePotential::harmonic(g.x1, kappa),
                         ElectrodePotential::harmonic(x2, kappa)},
                        g.mass, {g.x1 - g.margin, x2 + g.margin});
}

PotentialModel make_surrogate_model(const SurrogateGeometry& g) {
  const double x2 = g.x1 + g.spacing;
  return PotentialModel(
      {ElectrodePotential::surrogate(g.x1, g.width, g.height),
       ElectrodePotential::surrogate(x2, g.width, g.height)},
      g.mass, {g.x1 - g.margin, x2 + g.margin});
}

}  // namespace shuttle
