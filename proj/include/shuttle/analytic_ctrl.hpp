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

#include <array>
#include <cstddef>
#include <vector>

#include "shuttle/classical_sim.hpp"
#include "shuttle/ramps.hpp"
#include "shuttle/trap_model.hpp"

namespace shuttle {

// Time-optimal two-segment transport in the harmonic model with the
// control bound |u_i| <= u_max. x(t) is piecewise parabolic.
struct BangBangSolution {
  double t_sw;
  double t_min;
  double u_max;
  double omega0;
  double x1;
  double x2;

  double acceleration() const;  // magnitude, um/us^2
  double position(double t) const;
  double velocity(double t) const;
  // u_1 = -u_2 = +u_max before the switch, sign-flipped after
  void control(double t, std::span<double> volts) const;
};

struct BangBang {
  BangBangSolution solution;
  VoltageRamp ramp;  // switch snapped to the nearest sample
};

BangBangSolution bangbang_solution(double omega0, double u_max, double x1,
                                   double x2);
BangBang bangbang(double omega0, double u_max, double x1, double x2,
                  std::size_t samples = kDefaultSamples);

// Harmonic model whose force law matches the bang-bang trajectory above.
PotentialModel bangbang_model(double omega0, double x1, double x2,
                              double mass = 40.0);

struct IEARamp {
  VoltageRamp base;
  VoltageRamp compensation;
  VoltageRamp total;
  double max_abs = 0.0;
};

// Base well plus the compensating voltages for the inertial force
// m*alpha''. omega = 0 gives the free-flight limit with zero base.
IEARamp iea_ramp(const PotentialModel& model, const TransportFunction& tf,
                 double omega, std::size_t samples = kDefaultSamples);

// Compensation voltages alone at time t.
std::array<double, 2> iea_compensation(const PotentialModel& model,
                                       const TransportFunction& tf, double t);

// Same construction evaluated pointwise, for propagators that sample the
// control between grid points.
ControlFunction iea_control(const PotentialModel& model,
                            const TransportFunction& tf, double omega);

struct TminPoint {
  double u_max;
  double t_min;
};

// Smallest T (bisected to `resolution` us) whose IEA ramp respects
// max |U| <= u_max on the sample grid.
std::vector<TminPoint> iea_tmin_scan(const PotentialModel& model, double omega,
                                     const std::vector<double>& u_max,
                                     const TransportFunction& family,
                                     std::size_t samples = kDefaultSamples,
                                     double resolution = 1e-4);

void write_scan_csv(const std::string& path, const std::vector<TminPoint>& scan);

}  // namespace shuttle
