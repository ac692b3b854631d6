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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "shuttle/analytic_ctrl.hpp"
#include "shuttle/classical_oct.hpp"
#include "shuttle/classical_sim.hpp"
#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/experiment.hpp"
#include "shuttle/quantum_oct.hpp"
#include "shuttle/quantum_sim.hpp"
#include "shuttle/units.hpp"

namespace fs = std::filesystem;
using namespace shuttle;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double duration = 0.0;
  double u_max = 0.0;
  std::string backend;
  std::size_t samples = 0;
  std::string ramp;     // input ramp CSV
  std::string method = "classical";
  std::string table;
  std::string figure;
};

// File values first, then explicit flags.
TaskConfig resolve(const Flags& f) {
  TaskConfig c = f.config.empty() ? TaskConfig{} : load_config(f.config);
  if (f.jobs > 0) c.jobs = f.jobs;
  if (f.seed_set) c.seed = f.seed;
  if (f.duration > 0.0) c.duration = f.duration;
  if (f.u_max > 0.0) c.u_max = f.u_max;
  if (!f.backend.empty()) c.backend = f.backend;
  if (f.samples > 0) c.samples = f.samples;
  validate(c);
  return c;
}

fs::path bundle(const Flags& f, const TaskConfig& c, const std::string& name) {
  const fs::path dir = fs::path(f.out) / name;
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << config_json(c);
  return dir;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream(p) << j.dump(2) << "\n";
}

std::vector<double> initial_volts(const PotentialModel& model, const TaskConfig& c) {
  std::vector<double> u(model.size(), 0.0);
  u[0] = calibrate_bias(model, 0, c.omega());
  return u;
}

TransportFunction task_tf(const TaskConfig& c) {
  return make_transport_function(c.x_start, c.x_target(), c.duration);
}

VoltageRamp input_ramp(const Flags& f, const PotentialModel& model, const TaskConfig& c) {
  if (!f.ramp.empty()) return read_ramp_csv(f.ramp);
  return guess_voltages(model, task_tf(c), c.omega(), c.samples);
}

int cmd_calibrate(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const double u = calibrate_bias(m, 0, c.omega());
  const fs::path d = bundle(f, c, "calibrate");
  write_json(d / "calibration.json",
             {{"bias_V", u}, {"frequency_mhz", c.frequency_mhz}, {"electrode", 1}});
  std::printf("bias %.10g V\n", u);
  return 0;
}

int cmd_guess(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const VoltageRamp r = guess_voltages(m, task_tf(c), c.omega(), c.samples);
  write_ramp_csv((bundle(f, c, "guess") / "ramp.csv").string(), r);
  return 0;
}

int cmd_simulate_classical(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const VoltageRamp r = input_ramp(f, m, c);
  const ClassicalTrajectory tr = propagate_classical(m, r, c.x_start, 0.0, Integrator::dopri5);
  const FinalEnergy e = final_energy(tr, m.mass(), c.omega(), c.x_target());
  const fs::path d = bundle(f, c, "simulate-classical");
  write_trajectory_csv((d / "trajectory.csv").string(), tr);
  write_json(d / "summary.json", {{"final_phonons", e.phonons}, {"duration_us", r.duration()}});
  std::printf("final excitation %.6g phonons\n", e.phonons);
  return 0;
}

int cmd_optimize_classical(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const OptimizationReport rep = optimize_classical(m, input_ramp(f, m, c), classical_config(c));
  const fs::path d = bundle(f, c, "optimize-classical");
  write_ramp_csv((d / "ramp.csv").string(), rep.ramp);
  std::ofstream(d / "report.json") << report_json(rep, config_json(c));
  std::printf("converged %d, final %.6g phonons after %zu iterations\n", rep.converged,
              rep.final_phonons, rep.history.size() - 1);
  return rep.converged ? 0 : 3;
}

int cmd_simulate_quantum(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const VoltageRamp r = input_ramp(f, m, c);
  const GridSpec g = grid_spec(c);
  const MovingWavefunction psi0 = ground_state(m, r.row(0), c.x_start, g);
  const auto last = r.row(r.samples() - 1);
  const std::vector<double> u1(last.begin(), last.end());
  const MovingWavefunction tgt = ground_state(m, u1, c.x_target(), g);
  QuantumOptions o;
  o.omega = c.omega();
  const QuantumResult q = propagate_quantum(m, r, psi0, o);
  const WellDiagnostics wd = final_well_diagnostics(q.final_state, m, u1, c.omega());
  const fs::path d = bundle(f, c, "simulate-quantum");
  write_observables_csv((d / "observables.csv").string(), q.series);
  const double ex = excitation_energy(q.final_state, m, u1, c.omega());
  const double fid = fidelity(q.final_state, tgt);
  write_json(d / "summary.json", {{"final_excitation_phonons", ex},
                                  {"fidelity", fid},
                                  {"max_norm_drift", q.max_norm_drift},
                                  {"min_uncertainty_hbar", wd.min_uncertainty},
                                  {"dp_oscillation", wd.dp_oscillation},
                                  {"squeezed", wd.squeezed}});
  std::printf("excitation %.6g phonons, fidelity %.9f\n", ex, fid);
  return 0;
}

int cmd_optimize_quantum(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const GridSpec g = grid_spec(c);
  VoltageRamp seed;
  if (!f.ramp.empty()) {
    seed = read_ramp_csv(f.ramp);
  } else {
    const OptimizationReport cr = classical_optimum(m, c, c.duration, c.u_max);
    if (!cr.converged)
      fail(ErrorKind::divergence, "classical seed did not converge; pass --ramp");
    seed = cr.ramp;
  }
  const MovingWavefunction psi0 = ground_state(m, seed.row(0), c.x_start, g);
  const MovingWavefunction tgt = ground_state(m, seed.row(seed.samples() - 1), c.x_target(), g);
  const OptimizationReport rep = optimize_quantum(m, seed, psi0, tgt, quantum_config(c));
  const fs::path d = bundle(f, c, "optimize-quantum");
  write_ramp_csv((d / "ramp.csv").string(), rep.ramp);
  std::ofstream(d / "report.json") << report_json(rep, config_json(c));
  std::printf("fidelity %.6f after %zu iterations\n", rep.final_fidelity, rep.history.size() - 1);
  return 0;
}

int cmd_iea(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  const TransportFunction tf = task_tf(c);
  const IEARamp r = iea_ramp(m, tf, c.omega(), c.samples);
  const fs::path d = bundle(f, c, "iea");
  write_ramp_csv((d / "ramp.csv").string(), r.total);
  write_ramp_csv((d / "base.csv").string(), r.base);
  write_ramp_csv((d / "compensation.csv").string(), r.compensation);
  write_json(d / "summary.json", {{"max_abs_V", r.max_abs}, {"within_u_max", r.max_abs <= c.u_max}});
  std::printf("max |U| %.6g V\n", r.max_abs);
  return 0;
}

int cmd_bangbang(const Flags& f) {
  const TaskConfig c = resolve(f);
  const BangBang b = bangbang(units::angular_mhz(c.omega0_mhz), c.u_max, c.x_start,
                              c.x_target(), c.samples);
  const fs::path d = bundle(f, c, "bangbang");
  write_ramp_csv((d / "ramp.csv").string(), b.ramp);
  write_json(d / "summary.json", {{"t_min_us", b.solution.t_min},
                                  {"t_switch_us", b.solution.t_sw},
                                  {"u_max", b.solution.u_max}});
  std::printf("T_min %.6g us, switch at %.6g us\n", b.solution.t_min, b.solution.t_sw);
  return 0;
}

int cmd_scan(const Flags& f) {
  const TaskConfig c = resolve(f);
  const PotentialModel m = build_model(c);
  std::vector<TminPoint> s;
  const auto tf = make_transport_function(c.x_start, c.x_target(), 1.0);
  if (f.method == "classical")
    s = scan_tmin_classical(m, c, c.scan_u_max, c.jobs);
  else if (f.method == "iea")
    s = iea_tmin_scan(m, c.omega(), c.scan_u_max, tf, c.samples);
  else if (f.method == "iea0")
    s = iea_tmin_scan(m, 0.0, c.scan_u_max, tf, c.samples);
  else
    fail(ErrorKind::config, "scan method must be classical, iea or iea0");
  write_scan_csv((bundle(f, c, "scan-tmin") / ("tmin_" + f.method + ".csv")).string(), s);
  for (const auto& p : s) std::printf("%g V: %.4f us\n", p.u_max, p.t_min);
  return 0;
}

int cmd_fit(const Flags& f) {
  const TaskConfig c = resolve(f);
  const csv::Table t = csv::read(f.table);
  if (t.header != std::vector<std::string>{"umax_V", "tmin_us"})
    fail(ErrorKind::config, f.table + ": expected header umax_V,tmin_us");
  std::vector<TminPoint> pts;
  for (const auto& r : t.rows) pts.push_back({r[0], r[1]});
  const PowerLawFit fit = fit_power_law(pts);
  std::ofstream(bundle(f, c, "fit") / "fit.json") << fit_json(fit);
  std::printf("a = %.6g(%.2g) us, b = %.6g(%.2g)\n", fit.a, fit.a_err, fit.b, fit.b_err);
  return 0;
}

int cmd_reproduce(const Flags& f) {
  const TaskConfig c = resolve(f);
  reproduce(f.figure, c, f.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voltage ramps for trapped-ion shuttling"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON task config");
    s->add_option("--out", f.out, "output directory");
    s->add_option("--jobs", f.jobs, "worker cap for scans");
    s->add_option("--seed", f.seed, "seed for randomized steps")->each([&](const std::string&) {
      f.seed_set = true;
    });
    s->add_option("--duration", f.duration, "transport time T (us)");
    s->add_option("--u-max", f.u_max, "voltage bound (V)");
    s->add_option("--backend", f.backend, "harmonic | surrogate | tabulated");
    s->add_option("--samples", f.samples, "ramp samples");
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Cmd cmds[] = {
      {"calibrate", "bias voltage for the configured trap frequency", cmd_calibrate},
      {"guess", "static-well guess ramp", cmd_guess},
      {"simulate-classical", "propagate a ramp classically", cmd_simulate_classical},
      {"optimize-classical", "classical Krotov optimization", cmd_optimize_classical},
      {"simulate-quantum", "wavepacket propagation of a ramp", cmd_simulate_quantum},
      {"optimize-quantum", "quantum Krotov optimization", cmd_optimize_quantum},
      {"iea", "inverse-engineered ramp", cmd_iea},
      {"bangbang", "time-optimal bang-bang ramp", cmd_bangbang},
      {"scan-tmin", "minimum transport time per voltage bound", cmd_scan},
      {"fit", "power-law fit of a scan table", cmd_fit},
      {"reproduce", "figure data bundle", cmd_reproduce},
  };
  int (*run)(const Flags&) = nullptr;
  for (const Cmd& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    common(s);
    if (std::string(c.name) == "simulate-classical" || std::string(c.name) == "simulate-quantum" ||
        std::string(c.name) == "optimize-classical" || std::string(c.name) == "optimize-quantum")
      s->add_option("--ramp", f.ramp, "input ramp CSV (t_us,U1_V,U2_V)");
    if (std::string(c.name) == "scan-tmin")
      s->add_option("--method", f.method, "classical | iea | iea0");
    if (std::string(c.name) == "fit")
      s->add_option("--table", f.table, "scan CSV (umax_V,tmin_us)")->required();
    if (std::string(c.name) == "reproduce")
      s->add_option("figure", f.figure, "fig3 | fig4 | fig5 | fig6 | fig7")->required();
    s->callback([&run, c] { run = c.run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(f);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
