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


// Independent reference computations for the tests. Nothing here calls
// into the library beyond plain data types.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 0.0635077993;
inline constexpr double qe = 9.648533212e7;

// Strip electrode of width w at height h, closed form and derivatives.
struct Strip {
  double c, w, h;
  double phi(double x) const {
    return (std::atan((x - c + w / 2) / h) - std::atan((x - c - w / 2) / h)) / pi;
  }
  double d1(double x) const {
    const double a = x - c + w / 2, b = x - c - w / 2;
    return (h / (h * h + a * a) - h / (h * h + b * b)) / pi;
  }
  double d2(double x) const {
    const double a = x - c + w / 2, b = x - c - w / 2;
    auto g = [&](double u) { return -2.0 * h * u / ((h * h + u * u) * (h * h + u * u)); };
    return (g(a) - g(b)) / pi;
  }
};

// Central differences, step chosen for ~1e-8 relative accuracy on
// smooth functions of unit scale.
inline double diff1(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
inline double diff2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
         (12 * h * h);
}

// Undamped oscillator released at (x0, v0) around c.
inline double sho_x(double x0, double v0, double c, double w, double t) {
  return c + (x0 - c) * std::cos(w * t) + v0 / w * std::sin(w * t);
}

// Fixed-step RK4 for x'' = a(t, x).
struct Point { double x, v; };
inline Point rk4(const std::function<double(double, double)>& a, double x, double v,
                 double T, int steps) {
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const double k1x = v, k1v = a(t, x);
    const double k2x = v + 0.5 * h * k1v, k2v = a(t + 0.5 * h, x + 0.5 * h * k1x);
    const double k3x = v + 0.5 * h * k2v, k3v = a(t + 0.5 * h, x + 0.5 * h * k2x);
    const double k4x = v + h * k3v, k4v = a(t + h, x + h * k3x);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return {x, v};
}

// Minimum-jerk shape 10 s^3 - 15 s^4 + 6 s^5 and its derivatives in t.
inline double quintic(double s) { return s * s * s * (10 - 15 * s + 6 * s * s); }
inline double quintic_dd(double s) { return 60 * s - 180 * s * s + 120 * s * s * s; }

// Ground-state Gaussian of a harmonic well on a lab grid.
inline std::complex<double> gaussian(double x, double c, double m, double w, double p = 0) {
  const double s2 = hbar / (2 * m * w);
  return std::pow(2 * pi * s2, -0.25) * std::exp(-(x - c) * (x - c) / (4 * s2)) *
         std::exp(std::complex<double>(0, p * (x - c) / hbar));
}

// Ordinary least squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= x.size(); my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace oracle
