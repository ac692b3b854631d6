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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace shuttle {

// Value and first two spatial derivatives of a scalar field.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Chebyshev series on [lo, hi] with precomputed derivative series.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double lo, double hi, std::vector<double> coeffs);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& coeffs() const { return c0_; }
  std::size_t degree() const { return c0_.empty() ? 0 : c0_.size() - 1; }

  Jet eval(double x) const;

 private:
  double lo_ = -1.0;
  double hi_ = 1.0;
  std::vector<double> c0_, c1_, c2_;
};

struct HarmonicBackend {
  double curvature;  // kappa: phi = -kappa (x - c)^2 / 2
};

struct SurrogateBackend {
  double width;
  double height;
};

struct SeriesBackend {
  ChebyshevSeries series;
};

using Backend = std::variant<HarmonicBackend, SurrogateBackend, SeriesBackend>;

// Normal potential of one electrode: the dimensionless potential at
// x when that electrode sits at 1 V and all others are grounded.
class ElectrodePotential {
 public:
  static ElectrodePotential harmonic(double center, double curvature);
  static ElectrodePotential surrogate(double center, double width,
                                      double height);
  static ElectrodePotential series(double center, ChebyshevSeries s);

  double center() const { return center_; }
  const Backend& backend() const { return backend_; }
  Jet eval(double x) const;
  // phi(x) - phi(x_ref), accurate when the two points are close.
  double difference(double x, double x_ref) const;

 private:
  ElectrodePotential(double center, Backend b)
      : center_(center), backend_(std::move(b)) {}
  double center_;
  Backend backend_;
};

struct Window {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

class PotentialModel {
 public:
  PotentialModel(std::vector<ElectrodePotential> electrodes, double mass,
                 Window window);

  std::size_t size() const { return electrodes_.size(); }
  const ElectrodePotential& electrode(std::size_t i) const {
    return electrodes_[i];
  }
  const std::vector<ElectrodePotential>& electrodes() const {
    return electrodes_;
  }
  double mass() const { return mass_; }
  const Window& window() const { return window_; }
  double spacing() const;

  // No window check; used in hot loops after the caller validated x.
  Jet potential_unchecked(std::span<const double> volts, double x) const;

 private:
  std::vector<ElectrodePotential> electrodes_;
  double mass_;
  Window window_;
};

// V(x) = e * sum_i U_i phi_i(x) in internal energy units, with V', V''.
Jet eval_potential(const PotentialModel& model, std::span<const double> volts,
                   double x);

// Bias on one electrode (others grounded) giving trap frequency omega
// (rad/us) at that electrode's center.
double calibrate_bias(const PotentialModel& model, std::size_t electrode,
                      double omega);

// Position of the potential minimum nearest to `guess` (Newton on V').
double find_minimum(const PotentialModel& model, std::span<const double> volts,
                    double guess);

struct TabulatedSample {
  double x;
  double phi1;
  double phi2;
};

struct TabulatedFit {
  ElectrodePotential first;
  ElectrodePotential second;
  double residual;   // max abs deviation over the samples
  double condition;  // design-matrix condition number
};

inline constexpr double kFitConditionLimit = 1e10;

TabulatedFit fit_tabulated(std::span<const TabulatedSample> samples,
                           std::size_t degree);

std::vector<TabulatedSample> read_tabulated_csv(const std::string& path);
void write_tabulated_csv(const std::string& path,
                         std::span<const TabulatedSample> samples);

// Model builders. Defaults follow the reference geometry: d = 280 um.
struct HarmonicGeometry {
  double mass = 40.0;
  double x1 = 0.0;
  double spacing = 280.0;
  double omega0 = 2.0 * 3.14159265358979323846 * 0.55;  // per sqrt(volt)
  double margin = 280.0;
};

struct SurrogateGeometry {
  double mass = 40.0;
  double x1 = 0.0;
  double spacing = 280.0;
  double width = 240.0;
  double height = 295.0;
  double margin = 140.0;
};

PotentialModel make_harmonic_model(const HarmonicGeometry& g = {});
PotentialModel make_surrogate_model(const SurrogateGeometry& g = {});

}  // namespace shuttle
