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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shuttle/trap_model.hpp"

namespace shuttle {

// Commanded well position alpha(t) = x1 + d * f(t/T), f a polynomial.
class TransportFunction {
 public:
  // Default shape 10 s^3 - 15 s^4 + 6 s^5.
  TransportFunction(double x1, double x2, double duration);
  // Custom shape; coefficients of s^0, s^1, ... must satisfy the
  // boundary conditions f(0)=0, f(1)=1, f'=f''=0 at both ends.
  TransportFunction(double x1, double x2, double duration,
                    std::vector<double> shape);

  double x1() const { return x1_; }
  double x2() const { return x2_; }
  double distance() const { return x2_ - x1_; }
  double duration() const { return duration_; }
  const std::vector<double>& shape() const { return shape_; }

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;

  TransportFunction with_duration(double duration) const;

  // Time of largest |alpha''| on [0, T].
  double peak_acceleration_time() const;

 private:
  double shape_derivative(double s, int order) const;
  double x1_, x2_, duration_;
  std::vector<double> shape_;
};

TransportFunction make_transport_function(double x1, double x2, double T);

inline constexpr std::size_t kDefaultSamples = 2000;

class VoltageRamp {
 public:
  VoltageRamp() = default;
  VoltageRamp(double duration, std::size_t samples, std::size_t channels);

  double duration() const { return duration_; }
  std::size_t samples() const { return samples_; }
  std::size_t channels() const { return channels_; }
  double dt() const { return duration_ / static_cast<double>(samples_ - 1); }
  double time(std::size_t k) const {
    return k + 1 == samples_ ? duration_ : static_cast<double>(k) * dt();
  }

  double operator()(std::size_t k, std::size_t ch) const {
    return data_[k * channels_ + ch];
  }
  double& operator()(std::size_t k, std::size_t ch) {
    return data_[k * channels_ + ch];
  }
  std::span<const double> row(std::size_t k) const {
    return {data_.data() + k * channels_, channels_};
  }
  std::span<double> row(std::size_t k) {
    return {data_.data() + k * channels_, channels_};
  }

  // Linear interpolation; throws outside [0, T].
  void sample(double t, std::span<double> out) const;
  std::vector<double> sample(double t) const;

  double u_max() const { return u_max_; }
  // Sets the bound and clips every stored sample to it.
  void clamp(double u_max);
  double clamp_value(double v) const;
  double max_abs() const;

  // Same samples on a grid of the new duration.
  VoltageRamp stretched(double duration) const;
  // max_k,i |U_i(t_k) - U_{n+1-i}(T - t_k)| for mirrored electrodes.
  double symmetry_defect() const;

  const std::vector<double>& data() const { return data_; }

 private:
  double duration_ = 0.0;
  std::size_t samples_ = 0;
  std::size_t channels_ = 0;
  double u_max_ = std::numeric_limits<double>::infinity();
  std::vector<double> data_;
};

// Quantities from the two-electrode static-well equations, evaluated at
// the well position alpha.
struct WellSolve {
  Jet phi1;
  Jet phi2;
  double denominator;
};

WellSolve well_solve(const PotentialModel& model, double alpha);

// Throws degenerate_geometry if any |den| along alpha(t) falls below
// 1e-12 of the path maximum.
void check_denominators(const PotentialModel& model,
                        const TransportFunction& tf, std::size_t samples);

VoltageRamp guess_voltages(const PotentialModel& model,
                           const TransportFunction& tf, double omega,
                           std::size_t samples = kDefaultSamples);

VoltageRamp read_ramp_csv(const std::string& path);
void write_ramp_csv(const std::string& path, const VoltageRamp& ramp);
std::vector<std::string> ramp_header(std::size_t channels);

}  // namespace shuttle
