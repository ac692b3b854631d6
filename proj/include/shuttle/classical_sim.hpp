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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shuttle/ramps.hpp"
#include "shuttle/trap_model.hpp"

namespace shuttle {

enum class Integrator { rk4, dopri5 };

struct ClassicalState {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
};

struct ClassicalTrajectory {
  std::vector<double> t, x, v;

  std::size_t size() const { return t.size(); }
  ClassicalState state(std::size_t k) const { return {t[k], x[k], v[k]}; }
  ClassicalState final_state() const { return state(size() - 1); }
};

// Fills `volts` with the control at time t.
using ControlFunction = std::function<void(double t, std::span<double> volts)>;

ClassicalTrajectory propagate_classical(const PotentialModel& model,
                                        const VoltageRamp& ramp, double x0,
                                        double v0,
                                        Integrator mode = Integrator::rk4);

// Adaptive propagation of an arbitrary control; `breakpoints` are times
// where the control may be discontinuous and are stepped onto exactly.
// Output is sampled on `samples` uniform points over [0, T].
ClassicalTrajectory propagate_classical(const PotentialModel& model,
                                        const ControlFunction& control,
                                        double duration, std::size_t samples,
                                        std::span<const double> breakpoints,
                                        double x0, double v0);

// Acceleration -V'(x)/m for the given voltages.
double acceleration(const PotentialModel& model, std::span<const double> volts,
                    double x);

// One classic RK4 step from (x, v) with voltages at the start, middle
// and end of the step.
void rk4_step(const PotentialModel& model, std::span<const double> u0,
              std::span<const double> umid, std::span<const double> u1,
              double dt, double& x, double& v);

struct FinalEnergy {
  double energy;   // internal energy units
  double phonons;  // energy / (hbar omega)
};

FinalEnergy final_energy(double x, double v, double mass, double omega,
                         double x_target);
FinalEnergy final_energy(const ClassicalTrajectory& traj, double mass,
                         double omega, double x_target);

// phonons as a function of transport time
using ExcitationOfTime = std::function<double(double)>;

struct StabilityWindow {
  double lo;        // us
  double hi;        // us
  double width_ns;
};

// Largest contiguous interval around `center` where excitation stays
// below `threshold`. Edges are bracketed by outward steps starting at
// 0.1 ns and refined by bisection to `resolution` (us).
StabilityWindow stability_window(const ExcitationOfTime& excitation,
                                 double threshold, double center,
                                 double resolution = 1e-7);

// Ramp family: `ramp` time-stretched to each trial duration, propagated
// adaptively from rest at x_start.
StabilityWindow stability_window(const PotentialModel& model,
                                 const VoltageRamp& ramp, double x_start,
                                 double x_target, double omega,
                                 double threshold, double center);

void write_trajectory_csv(const std::string& path,
                          const ClassicalTrajectory& traj);

}  // namespace shuttle
