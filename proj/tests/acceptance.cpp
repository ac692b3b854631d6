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

// End-to-end checks, one line per criterion:
//   shuttle_acceptance [--only 1,4,9] [--expect-fail 5] [--jobs N]
//                      [--report FILE]
// Exit status is 1 if a criterion fails that was not listed in
// --expect-fail, so known-infeasible targets still print FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shuttle/analytic_ctrl.hpp"
#include "shuttle/classical_oct.hpp"
#include "shuttle/classical_sim.hpp"
#include "shuttle/experiment.hpp"
#include "shuttle/quantum_oct.hpp"
#include "shuttle/quantum_sim.hpp"
#include "shuttle/units.hpp"

using namespace shuttle;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int g_jobs = 1;
// 10 V classical minimum time on the surrogate, shared by 3 and 4
std::optional<double> g_tc;

Outcome bangbang_prefactor() {
  const auto s = bangbang_solution(units::angular_mhz(0.55), 1.0, 0.0, 280.0);
  Outcome o;
  o.pass = rel(s.t_min, 0.41) < 0.01 && s.t_sw == s.t_min / 2.0;
  o.detail = "T_min=" + fmt("%.5f", s.t_min) + " us, t_sw/T_min=" +
             fmt("%.15g", s.t_sw / s.t_min);
  return o;
}

Outcome classical_scaling(const std::string& backend, double& t10, PowerLawFit& fit) {
  TaskConfig c;
  c.backend = backend;
  const PotentialModel m = build_model(c);
  const auto scan = scan_tmin_classical(m, c, {10.0, 20.0, 40.0, 80.0}, g_jobs);
  fit = fit_power_law(scan);
  t10 = scan.front().t_min;
  std::ostringstream ss;
  ss << "T_min(U)=";
  for (const auto& p : scan) ss << p.t_min << (&p == &scan.back() ? "" : ",");
  ss << " us, b=" << fit.b << "+-" << fit.b_err << ", a=" << fit.a << " us";
  return {false, ss.str()};
}

Outcome harmonic_scaling() {
  double t10;
  PowerLawFit f;
  Outcome o = classical_scaling("harmonic", t10, f);
  o.pass = std::abs(f.b - 0.5) <= 0.02;
  return o;
}

Outcome surrogate_scaling() {
  double t10;
  PowerLawFit f;
  Outcome o = classical_scaling("surrogate", t10, f);
  g_tc = t10;
  o.pass = f.b >= 0.45 && f.b <= 0.53 && std::abs(t10 - 0.284) <= 0.2 * 0.284;
  return o;
}

Outcome squeezing_onset() {
  TaskConfig c;
  const PotentialModel m = build_model(c);
  if (!g_tc) {
    const auto scan = scan_tmin_classical(m, c, {c.u_max}, g_jobs);
    g_tc = scan.front().t_min;
  }
  const double tc = *g_tc;
  const OptimizationReport r = classical_optimum(m, c, tc, c.u_max);
  const GridSpec g = grid_spec(c);
  const auto psi0 = ground_state(m, r.ramp.row(0), c.x_start, g);
  const auto fin = propagate_quantum(m, r.ramp, psi0).final_state;
  const auto last = r.ramp.row(r.ramp.samples() - 1);
  const double exc = excitation_energy(fin, m, last, c.omega());
  const WellDiagnostics d = final_well_diagnostics(fin, m, last, c.omega());
  const double tq = scan_tmin_quantum(m, c, tc);
  const double ratio = tq / tc;
  Outcome o;
  o.pass = std::abs(d.min_uncertainty - 0.5) <= 1e-3 * 0.5 && d.squeezed &&
           ratio >= 2.0 && ratio <= 4.0;
  std::ostringstream ss;
  ss << "T_c=" << tc << " us: excitation " << exc << " phonons, min dx dp="
     << d.min_uncertainty << " hbar, dp oscillation " << d.dp_oscillation
     << "; T_q=" << tq << " us, ratio " << ratio;
  o.detail = ss.str();
  return o;
}

Outcome iea_exactness() {
  TaskConfig c;
  c.backend = "harmonic";
  const PotentialModel m = build_model(c);
  const double w = c.omega();
  const auto fam = make_transport_function(0.0, c.distance, 1.0);
  const double t = iea_tmin_scan(m, w, {10.0}, fam, c.samples).front().t_min;
  const auto tf = fam.with_duration(t);
  const ControlFunction u = iea_control(m, tf, w);
  std::vector<double> u0(2), u1(2);
  u(0.0, u0);
  u(t, u1);
  const auto psi0 = ground_state(m, u0, 0.0);
  const auto target = ground_state(m, u1, c.distance);
  const auto fin = propagate_quantum(m, u, t, 1000, psi0).final_state;
  const double inf = 1.0 - fidelity(fin, target);

  TaskConfig s;
  const PotentialModel ms = build_model(s);
  const double ts = iea_tmin_scan(ms, w, {10.0}, fam, s.samples).front().t_min;

  Outcome o;
  o.pass = rel(t, 0.418) <= 0.05 && inf < 1e-9;
  std::ostringstream ss;
  ss << "harmonic T_min=" << t << " us (" << 100 * rel(t, 0.418)
     << " % from 0.418), infidelity " << inf << "; surrogate T_min=" << ts << " us";
  o.detail = ss.str();
  return o;
}

Outcome iea_free_limit() {
  TaskConfig c;
  const PotentialModel m = build_model(c);
  const auto fam = make_transport_function(0.0, c.distance, 1.0);
  const auto scan = iea_tmin_scan(m, 0.0, {10.0, 20.0, 40.0, 80.0}, fam, c.samples, 1e-6);
  const PowerLawFit f = fit_power_law(scan);
  return {std::abs(f.b - 0.5) <= 1e-3, "b=" + fmt("%.6f", f.b)};
}

Outcome stability_windows() {
  TaskConfig c;
  const PotentialModel m = build_model(c);
  const double w = c.omega(), T = 3.351;
  const auto tf = make_transport_function(c.x_start, c.x_target(), T);
  const auto wi = stability_window(m, iea_ramp(m, tf, w, c.samples).total, c.x_start,
                                   c.x_target(), w, 0.1, T);
  const OptimizationReport r = classical_optimum(m, c, T, c.u_max);
  const auto wo = stability_window(m, r.ramp, c.x_start, c.x_target(), w, 0.1, T);

  // the guess minimum nearest to T, from a coarse scan refined by steps
  auto guess_energy = [&](double t) {
    const auto g = guess_voltages(m, make_transport_function(c.x_start, c.x_target(), t),
                                  w, c.samples);
    const auto tr = propagate_classical(m, g, c.x_start, 0.0, Integrator::dopri5);
    return final_energy(tr, m.mass(), w, c.x_target()).phonons;
  };
  const auto coarse = parallel_map<double>(401, g_jobs, [&](std::size_t k) {
    return guess_energy(T - 0.4 + 0.002 * k);
  });
  std::size_t kb = 0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const double t = T - 0.4 + 0.002 * k;
    const double tb = T - 0.4 + 0.002 * kb;
    const bool lower = coarse[k] < coarse[kb];
    const bool tie_closer = coarse[k] == coarse[kb] && std::abs(t - T) < std::abs(tb - T);
    if (lower || tie_closer) kb = k;
  }
  double tg = T - 0.4 + 0.002 * kb, best = coarse[kb];
  for (double step : {2e-4, 2e-5, 2e-6}) {
    const double c0 = tg;
    for (int j = -10; j <= 10; ++j) {
      const double t = c0 + j * step;
      const double e = guess_energy(t);
      if (e < best) {
        best = e;
        tg = t;
      }
    }
  }
  const auto g = guess_voltages(m, make_transport_function(c.x_start, c.x_target(), tg),
                                w, c.samples);
  const auto wg = stability_window(m, g, c.x_start, c.x_target(), w, 0.1, tg);
  Outcome o;
  o.pass = wi.width_ns > 13.0 && wo.width_ns > 60.0 && wg.width_ns >= 1.0 &&
           wg.width_ns < 10.0;
  std::ostringstream ss;
  ss << "IEA " << wi.width_ns << " ns, optimized " << wo.width_ns
     << " ns, guess " << wg.width_ns << " ns at its minimum T=" << tg << " us";
  o.detail = ss.str();
  return o;
}

Outcome propagator_oracles() {
  const double w = units::angular_mhz(1.3);
  const PotentialModel m = make_harmonic_model();
  const std::vector<double> v{calibrate_bias(m, 0.0, w), 0.0};
  const double s0 = std::sqrt(units::hbar / (2.0 * m.mass() * w));

  double auto_worst = 1.0, drift = 0.0;
  for (const PotentialModel& mm : {m, make_surrogate_model()}) {
    const std::vector<double> vv{calibrate_bias(mm, 0.0, w), 0.0};
    const auto g = ground_state(mm, vv, 0.0);
    const auto r = evolve_static(mm, vv, g, 2.0, 1000);
    auto_worst = std::min(auto_worst, fidelity(r.final_state, g));
    drift = std::max(drift, r.max_norm_drift);
  }

  const auto g = ground_state(m, v, 0.0, {256, 32 * s0});
  const double delta = 3.0 * s0;
  double track = 0.0;
  for (bool moving : {true, false}) {
    MovingWavefunction c = g;
    c.x_cl += delta;
    QuantumOptions o;
    o.moving = moving;
    const auto r = evolve_static(m, v, c, 1.0, 1000, o);
    for (const auto& s : r.series)
      track = std::max(track, std::abs(s.x_mean - delta * std::cos(w * s.t)));
    drift = std::max(drift, r.max_norm_drift);
  }

  const double L = 256 * s0;
  const double shift = 0.35 * L;
  const auto tf = make_transport_function(-0.5 * shift, 0.5 * shift, 2.5);
  const auto ramp = guess_voltages(m, tf, w, 600);
  const auto gs = ground_state(m, ramp.row(0), -0.5 * shift, {1024, L});
  const auto gm = ground_state(m, ramp.row(0), -0.5 * shift, {128, 16 * s0});
  const auto ts = ground_state(m, ramp.row(599), 0.5 * shift, {1024, L});
  const auto tm = ground_state(m, ramp.row(599), 0.5 * shift, {128, 16 * s0});
  QuantumOptions mov;
  // the static grid is the less accurate of the two (O(h^2) in the step)
  mov.substeps = 128;
  QuantumOptions stat = mov;
  stat.moving = false;
  const auto rs = propagate_quantum(m, ramp, gs, stat);
  const auto rm = propagate_quantum(m, ramp, gm, mov);
  drift = std::max({drift, rs.max_norm_drift, rm.max_norm_drift});
  const double Fs = fidelity(rs.final_state, ts), Fm = fidelity(rm.final_state, tm);

  Outcome o;
  o.pass = auto_worst > 1.0 - 1e-9 && track < 1e-6 * delta && drift < 1e-10 &&
           std::abs(Fs - Fm) < 1e-8 && Fm > 0.5 && Fm < 0.99;
  std::ostringstream ss;
  ss << "1-autocorrelation " << 1.0 - auto_worst << ", <x> error/delta "
     << track / delta << ", norm drift " << drift << ", |F_static-F_moving| "
     << std::abs(Fs - Fm) << " (F=" << Fm << ")";
  o.detail = ss.str();
  return o;
}

Outcome large_xi_oct() {
  TaskConfig c;
  const TaskConfig ref = [&] {
    TaskConfig r = c;
    r.distance = SurrogateGeometry{}.spacing;
    r.x_start = 0.0;
    return r;
  }();
  const PotentialModel base = build_model(ref);
  const double T = xi_duration(c);
  const OptimizationReport seed = classical_optimum(base, ref, T, c.u_max);
  const XiTask t = build_xi_task(c, 0.4, seed.ramp);
  QuantumOptions po;
  po.record_observables = false;
  const double Fc =
      fidelity(propagate_quantum(t.model, t.seed, t.psi0, po).final_state, t.target);
  const auto tf = make_transport_function(0.0, t.model.spacing(), T);
  const double Fi = fidelity(propagate_quantum(t.model, iea_control(t.model, tf, c.omega()),
                                               T, c.samples - 1, t.psi0, po)
                                 .final_state,
                             t.target);
  QuantumOctConfig q = quantum_config(c);
  q.u_max = t.u_max;
  q.max_iterations = 2000;
  const OptimizationReport r = optimize_quantum(t.model, t.seed, t.psi0, t.target, q);
  const int iters = static_cast<int>(r.history.size()) - 1;
  Outcome o;
  o.pass = Fc < 0.95 && Fi < 0.99 && r.final_fidelity >= 0.999 && iters <= 2000;
  std::ostringstream ss;
  ss << "T=" << T << " us: classical " << Fc << ", IEA " << Fi << ", quantum OCT "
     << r.final_fidelity << " after " << iters << " iterations";
  o.detail = ss.str();
  return o;
}

Outcome gradient_checks() {
  const double w = units::angular_mhz(1.3);
  double worst = 0.0;
  bool signs = true;
  for (const PotentialModel& m : {make_surrogate_model(), make_harmonic_model()}) {
    OptimizationConfig c;
    c.omega = w;
    c.x_start = 0.0;
    c.x_target = 280.0;
    const auto g = guess_voltages(m, make_transport_function(0, 280, 0.4), w, 2000);
    const auto tr = propagate_classical(m, g, 0.0, 0.0);
    const auto p = costate_backward(m, g, tr, c);
    VoltageRamp d = krotov_direction(m, tr, p, default_shape(g.samples()));
    const double eps = 1e-4 / d.max_abs();
    VoltageRamp plus = g, minus = g;
    for (std::size_t k = 0; k < g.samples(); ++k)
      for (std::size_t i = 0; i < 2; ++i) {
        d(k, i) *= eps;
        plus(k, i) += d(k, i);
        minus(k, i) -= d(k, i);
      }
    auto J = [&](const VoltageRamp& r) {
      return classical_functional(propagate_classical(m, r, 0.0, 0.0), m, c);
    };
    const double fd = 0.5 * (J(plus) - J(minus));
    const double pred = predicted_change(m, tr, p, d);
    signs = signs && pred < 0.0;
    worst = std::max(worst, rel(pred, fd));
  }
  const double classical_err = worst;

  const auto base = make_surrogate_model();
  const auto gs = guess_voltages(base, make_transport_function(0, 280, 0.42), w, 2000);
  const double s0 = std::sqrt(units::hbar / (2.0 * base.mass() * w));
  const XiTask t = make_xi_task(0.4, w, gs, 10.0, {256, 32 * s0});
  const auto gr = quantum_gradient(t.model, t.seed, t.psi0, t.target);
  VoltageRamp d = gr.g;
  const auto shape = default_shape(d.samples());
  const double eps = 1e-6 * t.u_max / gr.g.max_abs();
  for (std::size_t k = 0; k < d.samples(); ++k)
    for (std::size_t i = 0; i < 2; ++i) d(k, i) *= eps * shape[k];
  auto F = [&](double s) {
    VoltageRamp r = t.seed;
    for (std::size_t k = 0; k < r.samples(); ++k)
      for (std::size_t i = 0; i < 2; ++i) r(k, i) += s * d(k, i);
    return fidelity(propagate_quantum(t.model, r, t.psi0).final_state, t.target);
  };
  const double fd = 0.5 * (F(1.0) - F(-1.0));
  const double pred = predicted_fidelity_change(gr, d);
  const double quantum_err = rel(pred, fd);
  Outcome o;
  o.pass = signs && pred > 0.0 && classical_err < 1e-3 && quantum_err < 1e-3;
  o.detail = "classical rel. error " + fmt("%.3g", classical_err) +
             ", quantum rel. error " + fmt("%.3g", quantum_err);
  return o;
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.insert(std::stoi(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string only, expect, report;
  app.add_option("--only", only, "comma-separated criterion numbers");
  app.add_option("--expect-fail", expect, "criteria whose failure is known");
  app.add_option("--jobs", g_jobs, "worker cap for scans");
  app.add_option("--report", report, "also write the result lines here");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> pick = parse_list(only), known = parse_list(expect);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> all{
      {"bang-bang prefactor", bangbang_prefactor},
      {"harmonic scaling exponent", harmonic_scaling},
      {"surrogate scaling", surrogate_scaling},
      {"squeezing onset", squeezing_onset},
      {"IEA exactness (harmonic)", iea_exactness},
      {"IEA free-flight exponent", iea_free_limit},
      {"stability windows", stability_windows},
      {"propagator oracles", propagator_oracles},
      {"quantum OCT at xi=0.4", large_xi_oct},
      {"Krotov gradient check", gradient_checks},
  };

  std::ofstream rep;
  if (!report.empty()) rep.open(report);
  int unexpected = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool excused = !o.pass && known.count(id);
    if (!o.pass && !excused) ++unexpected;
    char head[160];
    std::snprintf(head, sizeof head, "criterion %2d %s  %s: ", id, o.pass ? "PASS" : "FAIL",
                  all[i].first);
    char tail[64];
    std::snprintf(tail, sizeof tail, " [%.1f s]%s", sec, excused ? " (known)" : "");
    const std::string line = head + o.detail + tail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (rep) rep << line << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
