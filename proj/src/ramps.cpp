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

#include "shuttle/ramps.hpp"

#include <algorithm>
#include <cmath>

#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

namespace {

void check_shape(const std::vector<double>& c) {
  auto eval = [&](double s, int order) {
    double acc = 0.0;
    for (std::size_t n = static_cast<std::size_t>(order); n < c.size(); ++n) {
      double f = 1.0;
      for (int j = 0; j < order; ++j) f *= static_cast<double>(n - j);
      acc += f * c[n] * std::pow(s, static_cast<double>(n - order));
    }
    return acc;
  };
  const double tol = 1e-10;
  if (std::abs(eval(0, 0)) > tol || std::abs(eval(1, 0) - 1.0) > tol)
    fail(ErrorKind::domain, "transport shape must run from 0 to 1");
  for (int order = 1; order <= 2; ++order)
    if (std::abs(eval(0, order)) > tol || std::abs(eval(1, order)) > tol)
      fail(ErrorKind::domain,
           "transport shape must start and end with zero velocity and "
           "acceleration");
}

}  // namespace

TransportFunction::TransportFunction(double x1, double x2, double duration)
    : TransportFunction(x1, x2, duration, {0, 0, 0, 10, -15, 6}) {}

TransportFunction::TransportFunction(double x1, double x2, double duration,
                                     std::vector<double> shape)
    : x1_(x1), x2_(x2), duration_(duration), shape_(std::move(shape)) {
  if (!(duration_ > 0.0))
    fail(ErrorKind::domain, "transport duration must be positive");
  check_shape(shape_);
}

double TransportFunction::shape_derivative(double s, int order) const {
  // Horner on the differentiated polynomial.
  double acc = 0.0;
  for (std::size_t n = shape_.size(); n-- > static_cast<std::size_t>(order);) {
    double f = 1.0;
    for (int j = 0; j < order; ++j) f *= static_cast<double>(n - j);
    acc = acc * s + f * shape_[n];
  }
  return acc;
}

double TransportFunction::position(double t) const {
  return x1_ + distance() * shape_derivative(t / duration_, 0);
}

double TransportFunction::velocity(double t) const {
  return distance() * shape_derivative(t / duration_, 1) / duration_;
}

double TransportFunction::acceleration(double t) const {
  return distance() * shape_derivative(t / duration_, 2) /
         (duration_ * duration_);
}

TransportFunction TransportFunction::with_duration(double duration) const {
  return TransportFunction(x1_, x2_, duration, shape_);
}

double TransportFunction::peak_acceleration_time() const {
  const int n = 4000;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(shape_derivative(double(i) / n, 2));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  // Golden-section refinement of |f''| around the best sample.
  double a = std::max(0.0, double(best - 1) / n);
  double b = std::min(1.0, double(best + 1) / n);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double s) { return -std::abs(shape_derivative(s, 2)); };
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (f(c) < f(d)) b = d; else a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b) * duration_;
}

TransportFunction make_transport_function(double x1, double x2, double T) {
  return TransportFunction(x1, x2, T);
}

VoltageRamp::VoltageRamp(double duration, std::size_t samples,
                         std::size_t channels)
    : duration_(duration), samples_(samples), channels_(channels),
      data_(samples * channels, 0.0) {
  if (!(duration > 0.0)) fail(ErrorKind::domain, "ramp duration must be > 0");
  if (samples < 2) fail(ErrorKind::domain, "ramp needs at least 2 samples");
  if (channels == 0) fail(ErrorKind::domain, "ramp needs a channel");
}

void VoltageRamp::sample(double t, std::span<double> out) const {
  if (!(t >= 0.0 && t <= duration_))
    fail(ErrorKind::domain, "ramp sampled outside [0, T]");
  const double pos = t / dt();
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k >= samples_ - 1) k = samples_ - 2;
  double w = pos - static_cast<double>(k);
  w = std::clamp(w, 0.0, 1.0);
  for (std::size_t ch = 0; ch < channels_; ++ch) {
    const double a = (*this)(k, ch), b = (*this)(k + 1, ch);
    out[ch] = w == 0.0 ? a : (w == 1.0 ? b : a + w * (b - a));
  }
}

std::vector<double> VoltageRamp::sample(double t) const {
  std::vector<double> out(channels_);
  sample(t, out);
  return out;
}

double VoltageRamp::clamp_value(double v) const {
  return std::clamp(v, -u_max_, u_max_);
}

void VoltageRamp::clamp(double u_max) {
  if (!(u_max > 0.0)) fail(ErrorKind::domain, "U_max must be positive");
  u_max_ = u_max;
  for (auto& v : data_) v = clamp_value(v);
}

double VoltageRamp::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

VoltageRamp VoltageRamp::stretched(double duration) const {
  VoltageRamp r = *this;
  if (!(duration > 0.0)) fail(ErrorKind::domain, "ramp duration must be > 0");
  r.duration_ = duration;
  return r;
}

double VoltageRamp::symmetry_defect() const {
  double m = 0.0;
  for (std::size_t k = 0; k < samples_; ++k)
    for (std::size_t ch = 0; ch < channels_; ++ch)
      m = std::max(m, std::abs((*this)(k, ch) -
                               (*this)(samples_ - 1 - k, channels_ - 1 - ch)));
  return m;
}

WellSolve well_solve(const PotentialModel& model, double alpha) {
  WellSolve w;
  w.phi1 = model.electrode(0).eval(alpha);
  w.phi2 = model.electrode(1).eval(alpha);
  w.denominator = w.phi2.d2 * w.phi1.d1 - w.phi2.d1 * w.phi1.d2;
  return w;
}

void check_denominators(const PotentialModel& model,
                        const TransportFunction& tf, std::size_t samples) {
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = tf.duration() * double(k) / double(samples - 1);
    const double d = std::abs(well_solve(model, tf.position(t)).denominator);
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (!(dmin >= 1e-12 * dmax) || dmax == 0.0)
    fail(ErrorKind::degenerate_geometry,
         "electrode geometry cannot hold a well along the transport path");
}

VoltageRamp guess_voltages(const PotentialModel& model,
                           const TransportFunction& tf, double omega,
                           std::size_t samples) {
  check_denominators(model, tf, samples);
  VoltageRamp r(tf.duration(), samples, model.size());
  const double k = model.mass() * omega * omega / units::volt_energy;
  for (std::size_t i = 0; i < samples; ++i) {
    const WellSolve w = well_solve(model, tf.position(r.time(i)));
    r(i, 0) = -k * w.phi2.d1 / w.denominator;
    r(i, 1) = k * w.phi1.d1 / w.denominator;
  }
  return r;
}

std::vector<std::string> ramp_header(std::size_t channels) {
  std::vector<std::string> h{"t_us"};
  for (std::size_t i = 0; i < channels; ++i)
    h.push_back("U" + std::to_string(i + 1) + "_V");
  return h;
}

VoltageRamp read_ramp_csv(const std::string& path) {
  const csv::Table t = csv::read(path);
  if (t.header.size() < 3 || t.header != ramp_header(t.header.size() - 1))
    fail(ErrorKind::config, path + ": expected header t_us,U1_V,U2_V");
  if (t.rows.size() < 2) fail(ErrorKind::config, path + ": too few samples");
  const std::size_t n = t.rows.size(), ch = t.header.size() - 1;
  const double T = t.rows.back()[0];
  VoltageRamp r(T, n, ch);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(t.rows[k][0] - r.time(k)) > 1e-9 * T)
      fail(ErrorKind::config, path + ": time grid is not uniform from 0");
    for (std::size_t c = 0; c < ch; ++c) r(k, c) = t.rows[k][c + 1];
  }
  return r;
}

void write_ramp_csv(const std::string& path, const VoltageRamp& ramp) {
  std::vector<std::vector<double>> rows(ramp.samples());
  for (std::size_t k = 0; k < ramp.samples(); ++k) {
    rows[k].push_back(ramp.time(k));
    for (double v : ramp.row(k)) rows[k].push_back(v);
  }
  csv::write(path, ramp_header(ramp.channels()), rows);
}

}  // namespace shuttle
