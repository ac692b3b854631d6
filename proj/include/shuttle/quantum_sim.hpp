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
#include <vector>

#include "shuttle/classical_sim.hpp"
#include "shuttle/fourier_grid.hpp"
#include "shuttle/ramps.hpp"
#include "shuttle/trap_model.hpp"

namespace shuttle {

struct GridSpec {
  std::size_t points = 128;
  // Window width L in um; 0 means 16 sigma_0 of the initial well.
  double width = 0.0;
};

// Window amplitudes psi_w(y) plus the frame that maps them to the lab:
//   psi(x) = exp(i phase) exp(i p_cl (x - x_cl) / hbar) psi_w(x - x_cl)
// with y_j = (j - N/2) dx and sum |psi_w|^2 dx = 1.
struct MovingWavefunction {
  std::vector<cplx> psi;
  double width = 0.0;
  double x_cl = 0.0;
  double p_cl = 0.0;
  double phase = 0.0;
  double t = 0.0;

  std::size_t size() const { return psi.size(); }
  double dx() const { return width / static_cast<double>(psi.size()); }
  double norm() const;
};

struct Observables {
  double t;
  double x_mean;       // um
  double p_mean;       // u um / us
  double dx;           // um
  double dp;           // u um / us
  double uncertainty;  // dx dp / hbar
  double excitation;   // phonons above the instantaneous well, NaN if none
};

// One moving-frame step: the frame (X, P) follows the classical path of
// the ramp over the step, then shifts by the in-window means.
struct FrameStep {
  double x_mid, p_mid, force_mid;
  double x_end, p_end;  // after the classical step, before the shift
  double shift_x, shift_p;
};

struct FrameSchedule {
  double x0 = 0.0, p0 = 0.0;
  std::size_t substeps = 1;
  std::vector<FrameStep> steps;

  // frame (x_cl, p_cl) entering step j
  double x_start(std::size_t j) const {
    return j == 0 ? x0 : steps[j - 1].x_end + steps[j - 1].shift_x;
  }
  double p_start(std::size_t j) const {
    return j == 0 ? p0 : steps[j - 1].p_end + steps[j - 1].shift_p;
  }
};

struct QuantumOptions {
  double cheb_tolerance = 1e-16;
  bool moving = true;
  std::size_t substeps = 1;  // propagation steps per ramp interval
  bool record_observables = true;
  bool record_states = false;
  // Reference trap frequency for the excitation column; 0 skips it.
  double omega = 0.0;
  double norm_tolerance = 1e-8;
};

struct QuantumResult {
  MovingWavefunction final_state;
  std::vector<Observables> series;
  std::vector<MovingWavefunction> states;  // per ramp sample if recorded
  FrameSchedule schedule;
  double max_norm_drift = 0.0;
};

// Chebyshev propagator for the in-window Hamiltonian
//   H_w = p^2 / 2m + V(y + X) - V(X) + F y.
class QuantumStepper {
 public:
  QuantumStepper(const PotentialModel& model, std::size_t points,
                 double width, double tolerance = 1e-16);

  const FourierGrid& grid() const { return grid_; }
  const PotentialModel& model() const { return *model_; }

  // Returns V(X) for the frame phase.
  double set_potential(std::span<const double> volts, double x_frame,
                       double force);
  const std::vector<double>& potential() const { return w_; }

  // exp(-i H_w dt / hbar), dt of either sign; adds -E_mid dt / hbar to
  // phase. Returns the number of Chebyshev terms used.
  int propagate(std::vector<cplx>& psi, double dt, double& phase);
  // exp(-H_w tau / hbar) followed by renormalization.
  void relax(std::vector<cplx>& psi, double tau);
  double energy(const std::vector<cplx>& psi);
  void apply(const std::vector<cplx>& in, std::vector<cplx>& out);
  double spectral_range() const { return e_max_ - e_min_; }

  void set_tolerance(double tol) { tol_ = tol; }

 private:
  void bounds();
  const PotentialModel* model_;
  FourierGrid grid_;
  double tol_;
  std::vector<double> w_, kin_;
  double e_min_ = 0.0, e_max_ = 0.0;
  std::vector<cplx> a_, b_, c_, hb_, acc_;
};

// Potential difference V(x) - V(x_ref) without catastrophic cancellation.
double potential_difference(const PotentialModel& model,
                            std::span<const double> volts, double x,
                            double x_ref);

double default_window_width(const PotentialModel& model,
                            std::span<const double> volts, double center);

MovingWavefunction ground_state(const PotentialModel& model,
                                std::span<const double> volts, double center,
                                const GridSpec& grid = {});

// n-th harmonic-oscillator eigenfunction of the local well, unrelaxed.
MovingWavefunction oscillator_state(const PotentialModel& model,
                                    std::span<const double> volts,
                                    double center, int n,
                                    const GridSpec& grid = {});

QuantumResult propagate_quantum(const PotentialModel& model,
                                const VoltageRamp& ramp,
                                const MovingWavefunction& psi0,
                                const QuantumOptions& opts = {});

// Same, driven by a continuous control evaluated at the exact sub-step
// times; observables are recorded on `steps + 1` uniform points.
QuantumResult propagate_quantum(const PotentialModel& model,
                                const ControlFunction& control,
                                double duration, std::size_t steps,
                                const MovingWavefunction& psi0,
                                const QuantumOptions& opts = {});

// Free evolution under fixed voltages for `duration`, `steps` steps.
QuantumResult evolve_static(const PotentialModel& model,
                            std::span<const double> volts,
                            const MovingWavefunction& psi0, double duration,
                            std::size_t steps, const QuantumOptions& opts = {});

// Apply / undo one scheduled step with voltages u_mid (Krotov sweeps).
void scheduled_forward(QuantumStepper& stepper, MovingWavefunction& psi,
                       const FrameSchedule& schedule, std::size_t j,
                       std::span<const double> u_mid, double dt);
void scheduled_backward(QuantumStepper& stepper, MovingWavefunction& psi,
                        const FrameSchedule& schedule, std::size_t j,
                        std::span<const double> u_mid, double dt);

Observables observe(const MovingWavefunction& psi, const FourierGrid& grid);

struct Overlap {
  cplx value;     // <psi|target> in the lab frame
  bool disjoint;  // frames too far apart to overlap
};

// Target re-expressed on psi's window and frame.
std::vector<cplx> to_frame(const MovingWavefunction& target,
                           const MovingWavefunction& psi,
                           const FourierGrid& grid, bool* disjoint = nullptr);
Overlap overlap(const MovingWavefunction& psi,
                const MovingWavefunction& target);
double fidelity(const MovingWavefunction& psi,
                const MovingWavefunction& target);

// (<H> - V_min - hbar omega / 2) / hbar omega for the given voltages.
double excitation_energy(const MovingWavefunction& psi,
                         const PotentialModel& model,
                         std::span<const double> volts, double omega);

struct WellDiagnostics {
  double min_uncertainty;  // min dx dp / hbar over one trap period
  double dp_oscillation;   // (max dp - min dp) / mean dp over the period
  double dx_oscillation;
  bool squeezed;           // dp_oscillation above 1e-2
};

WellDiagnostics final_well_diagnostics(const MovingWavefunction& psi,
                                       const PotentialModel& model,
                                       std::span<const double> volts,
                                       double omega,
                                       std::size_t steps = 400);

void write_observables_csv(const std::string& path,
                           const std::vector<Observables>& series);

}  // namespace shuttle
