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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shuttle/classical_sim.hpp"
#include "shuttle/ramps.hpp"
#include "shuttle/trap_model.hpp"

namespace shuttle {

struct OptimizationConfig {
  // <= 0 picks lambda so the first update peaks at initial_step volts.
  double lambda_a = 0.0;
  double initial_step = 0.5;
  // Update shape on the ramp grid; empty means sin^2(pi t / T).
  std::vector<double> shape;
  int max_iterations = 500;
  // Classical stop: E(T) below this many phonons.
  double target_phonons = 0.01;
  // Quantum stop: 1 - F below this.
  double target_infidelity = 1e-3;
  double u_max = std::numeric_limits<double>::infinity();
  double target_energy = 0.0;  // E_T
  // lambda doubles after a rejected sweep. After an accepted one it is
  // multiplied by lambda_shrink and, if lambda_tracks_functional, by
  // sqrt(J_new / J_old); J is quartic in the final-state error, so this
  // keeps the effective step from stalling as E(T) -> 0.
  double lambda_shrink = 0.85;
  bool lambda_tracks_functional = true;
  int max_rejections = 10;
  // The trap frequency entering the energy functional, and the task.
  double omega = 0.0;
  double x_start = 0.0;
  double x_target = 0.0;
};

struct IterationRecord {
  int iteration;
  double J;
  double energy_phonons;  // classical: E(T)/hbar w; quantum: excitation
  double fidelity;        // quantum only, NaN otherwise
  double max_delta_u;
  double lambda_a;
  bool accepted;
};

struct OptimizationReport {
  std::vector<IterationRecord> history;
  bool converged = false;
  VoltageRamp ramp;
  double final_J = 0.0;
  double final_phonons = 0.0;
  double final_fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct CostateVector {
  std::vector<double> p1, p2;
};

std::vector<double> default_shape(std::size_t samples);

// J = (E(T) - E_T)^2, E the motional energy in the target well.
double classical_functional(const ClassicalTrajectory& traj,
                            const PotentialModel& model,
                            const OptimizationConfig& cfg);

// Terminal costate -dJ/d(x, v).
std::array<double, 2> terminal_costate(const ClassicalTrajectory& traj,
                                       const PotentialModel& model,
                                       const OptimizationConfig& cfg);

// Backward RK4 over the ramp grid; the trajectory must be sampled on
// the same grid.
CostateVector costate_backward(const PotentialModel& model,
                               const VoltageRamp& ramp,
                               const ClassicalTrajectory& traj,
                               std::array<double, 2> p_final);
CostateVector costate_backward(const PotentialModel& model,
                               const VoltageRamp& ramp,
                               const ClassicalTrajectory& traj,
                               const OptimizationConfig& cfg);

// Forward RK4 of the same costate ODE from p(0); for round-trip checks.
CostateVector costate_forward(const PotentialModel& model,
                              const VoltageRamp& ramp,
                              const ClassicalTrajectory& traj,
                              std::array<double, 2> p_initial);

// Continuous first-order change of J for a ramp perturbation:
// dJ = int (e/m) p2 sum_i phi_i'(x) dU_i dt (trapezoid on the grid).
double predicted_change(const PotentialModel& model,
                        const ClassicalTrajectory& traj,
                        const CostateVector& p, const VoltageRamp& delta);

// Krotov direction without step size: -S p2 phi_i'(x) per sample.
VoltageRamp krotov_direction(const PotentialModel& model,
                             const ClassicalTrajectory& traj,
                             const CostateVector& p,
                             std::span<const double> shape);

OptimizationReport optimize_classical(const PotentialModel& model,
                                      const VoltageRamp& guess,
                                      const OptimizationConfig& cfg);

std::string report_json(const OptimizationReport& report,
                        const std::string& config_echo = "{}");

}  // namespace shuttle
