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
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "shuttle/analytic_ctrl.hpp"
#include "shuttle/classical_oct.hpp"
#include "shuttle/quantum_oct.hpp"
#include "shuttle/trap_model.hpp"

namespace shuttle {

// Ordered map over independent points. jobs <= 1 runs inline on the
// calling thread, which is the reference path used by the tests.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<Result> out(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  // exceptions cannot leave the parallel region; the lowest index wins
  std::vector<std::exception_ptr> err(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      err[i] = std::current_exception();
    }
  }
  for (const auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

struct TaskConfig {
  static constexpr int kSchemaVersion = 1;

  std::string backend = "surrogate";  // harmonic | surrogate | tabulated
  std::string tabulated_path;
  int fit_degree = 24;
  double mass = 40.0;
  double frequency_mhz = 1.3;
  double omega0_mhz = 0.55;  // harmonic backend, per sqrt(V)
  double distance = 280.0;
  double x_start = 0.0;
  double electrode_width = 240.0;
  double electrode_height = 295.0;
  double duration = 0.418;
  double u_max = 10.0;
  std::size_t samples = kDefaultSamples;
  std::string method = "classical-oct";
  // Sized for the squeezed packets that classically optimized ramps
  // leave at the classical minimum time (~40 phonons: dx and dp swing
  // by ~13x, so both the width and the spacing matter).
  GridSpec grid{4096, 0.0};
  double grid_width_sigma = 256.0;  // used when grid.width == 0

  // classical optimizer
  double c_lambda = 0.0;
  double c_initial_step = 0.5;
  int c_max_iterations = 30000;
  double c_target_phonons = 0.01;
  // quantum optimizer
  double q_lambda = 5e4;
  double q_lambda_shrink = 0.9;
  int q_max_iterations = 2000;
  double q_target_infidelity = 1e-3;

  std::vector<double> scan_u_max{10.0, 20.0, 40.0, 80.0};
  double scan_resolution = 1e-3;  // us
  double scan_t_guess = 0.0;      // us at 10 V, 0 = from bang-bang estimate

  double xi = 0.4;
  // 0: IEA minimum time of the 280 um task (0.421 us on the surrogate).
  // At that duration quantum OCT stalls near F = 0.9985 for xi = 0.4.
  double xi_duration = 0.5;
  std::size_t xi_grid_points = 256;
  double xi_grid_width_sigma = 32.0;
  std::vector<double> xi_list{5e-5, 5e-3, 5e-2, 0.1, 0.2, 0.4};
  std::vector<double> lambda_list{1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
  int study_iterations = 100;

  std::uint64_t seed = 0;
  int jobs = 1;

  double omega() const;
  double x_target() const { return x_start + distance; }
};

TaskConfig parse_config(const std::string& json_text);
TaskConfig load_config(const std::string& path);
std::string config_json(const TaskConfig& cfg);  // fully resolved
void validate(const TaskConfig& cfg);

PotentialModel build_model(const TaskConfig& cfg);
OptimizationConfig classical_config(const TaskConfig& cfg);
QuantumOctConfig quantum_config(const TaskConfig& cfg);

GridSpec grid_spec(const TaskConfig& cfg);

// Transport duration used for the xi family, and the family member
// seeded with the classically optimized reference ramp at that duration.
double xi_duration(const TaskConfig& cfg);
XiTask build_xi_task(const TaskConfig& cfg, double xi,
                     const VoltageRamp& seed_280);

// Classically optimized ramp at duration T (throws if it does not converge).
OptimizationReport classical_optimum(const PotentialModel& model,
                                     const TaskConfig& cfg, double T,
                                     double u_max);

// Final-well excitation of the ground state propagated with `ramp`.
double quantum_excitation(const PotentialModel& model, const TaskConfig& cfg,
                          const VoltageRamp& ramp);

// Smallest T >= t_start (scanned upward in `step`, refined to
// `resolution`) where the classically optimized ramp also leaves the
// wavepacket below cfg.c_target_phonons.
double scan_tmin_quantum(const PotentialModel& model, const TaskConfig& cfg,
                         double t_start, double step = 0.01,
                         double resolution = 1e-3);

// Smallest T (to cfg.scan_resolution) at which the classical optimizer
// reaches cfg.c_target_phonons within cfg.c_max_iterations, per U_max.
std::vector<TminPoint> scan_tmin_classical(const PotentialModel& model,
                                           const TaskConfig& cfg,
                                           const std::vector<double>& u_max,
                                           int jobs = 1);

// True when the optimizer converges at duration T under u_max.
bool classical_feasible(const PotentialModel& model, const TaskConfig& cfg,
                        double T, double u_max,
                        OptimizationReport* report = nullptr);

struct PowerLawFit {
  double a;  // us
  double b;
  double a_err;
  double b_err;
  double residual;  // rms of log residuals
};

// T = a * U^-b by least squares in log-log.
PowerLawFit fit_power_law(const std::vector<TminPoint>& table);

std::string fit_json(const PowerLawFit& fit);

// Writes the data bundle for one figure into `out_dir`.
void reproduce(const std::string& figure, const TaskConfig& cfg,
               const std::string& out_dir);

}  // namespace shuttle
