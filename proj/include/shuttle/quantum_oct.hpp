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
#include <string>
#include <vector>

#include "shuttle/analytic_ctrl.hpp"
#include "shuttle/classical_oct.hpp"
#include "shuttle/quantum_sim.hpp"

namespace shuttle {

struct QuantumOctConfig {
  double lambda_a = 1.0;           // 1/V
  std::vector<double> shape;       // empty: sin^2
  int max_iterations = 2000;
  double target_infidelity = 1e-3;
  double u_max = std::numeric_limits<double>::infinity();
  // Descent policy. With adaptive off lambda stays fixed and increases
  // of J are recorded, not rejected.
  bool adaptive = true;
  double lambda_shrink = 1.0;      // applied after each accepted sweep
  int max_rejections = 10;
  double omega = 0.0;              // for the excitation column, optional
  QuantumOptions propagation{};
};

// Forward/backward data for one ramp: F, and g_i(t_k) = Im <chi|phi_i|psi>
// on the ramp grid with chi(T) = <tgt|psi(T)> tgt.
struct QuantumGradient {
  double fidelity;
  cplx tau;
  VoltageRamp g;
  QuantumResult forward;
};

QuantumGradient quantum_gradient(const PotentialModel& model,
                                 const VoltageRamp& ramp,
                                 const MovingWavefunction& psi0,
                                 const MovingWavefunction& target,
                                 const QuantumOptions& opts = {});

// First-order change of F for a ramp perturbation:
// dF = (2e/hbar) int sum_i g_i dU_i dt.
double predicted_fidelity_change(const QuantumGradient& grad,
                                 const VoltageRamp& delta);

OptimizationReport optimize_quantum(const PotentialModel& model,
                                    const VoltageRamp& guess,
                                    const MovingWavefunction& psi0,
                                    const MovingWavefunction& target,
                                    const QuantumOctConfig& cfg);

// Shrunk-geometry family: surrogate electrodes at spacing d = sigma0/xi,
// widths scaled with d, fixed m and omega.
struct XiTask {
  double xi;
  double duration;
  double u_max;  // the 280 um bound scaled by (d/280)^2
  PotentialModel model;
  VoltageRamp seed;
  MovingWavefunction psi0;
  MovingWavefunction target;
};

PotentialModel make_xi_model(double xi, double omega, double mass = 40.0);

// Voltage scale between the reference geometry and the xi member.
double xi_voltage_scale(double xi, double omega, double mass = 40.0);

// Builds the task with `seed` given for the reference 280 um geometry
// (voltages are rescaled, time is unchanged).
XiTask make_xi_task(double xi, double omega, const VoltageRamp& seed_280,
                    double u_max_280, const GridSpec& grid);

// m d^2 omega / (2 pi h), the phase-space area in units of h.
double phase_space_volume(const PotentialModel& model, double omega);

struct ConvergencePoint {
  double xi;
  double lambda_a;
  double mean_dJ;
  double final_fidelity;
  bool unstable;
};

// Fixed lambda, `iterations` sweeps from the seed, for every (task,
// lambda) pair; runs in parallel over pairs.
std::vector<ConvergencePoint> convergence_study(
    const std::vector<XiTask>& tasks, const std::vector<double>& lambdas,
    int iterations = 100, int jobs = 0);

void write_study_csv(const std::string& path,
                     const std::vector<ConvergencePoint>& points);

// Relative force spread across +-sigma0 from the compensation voltages,
// at the time of largest |alpha''|.
double force_inhomogeneity(const PotentialModel& model, const IEARamp& ramp,
                           const TransportFunction& tf, double sigma0);

}  // namespace shuttle
