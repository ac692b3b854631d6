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

#include "shuttle/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

#include "shuttle/classical_sim.hpp"
#include "shuttle/csv.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

using nlohmann::json;

double TaskConfig::omega() const { return units::angular_mhz(frequency_mhz); }

namespace {

const std::set<std::string> kMethods{"guess", "classical-oct", "quantum-oct",
                                     "iea", "bangbang"};

// Reads known keys from one section; unknown keys are a config error so
// typos do not pass silently.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    obj_ = root.at(name);
    if (!obj_.is_object()) fail(ErrorKind::config, name + " must be an object");
  }
  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      fail(ErrorKind::config, name_ + "." + key + ": " + e.what());
    }
  }
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key()))
        fail(ErrorKind::config, "unknown key " + name_ + "." + it.key());
  }

 private:
  std::string name_;
  json obj_ = json::object();
  std::set<std::string> seen_;
};

}  // namespace

TaskConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::config, "config must be a JSON object");
  if (!root.contains("schema_version") ||
      root["schema_version"] != TaskConfig::kSchemaVersion)
    fail(ErrorKind::config, "config needs \"schema_version\": 1");
  static const std::set<std::string> top{
      "schema_version", "model", "task", "grid", "classical_oct", "quantum_oct",
      "scan", "study", "seed", "jobs"};
  for (auto it = root.begin(); it != root.end(); ++it)
    if (!top.count(it.key())) fail(ErrorKind::config, "unknown key " + it.key());

  TaskConfig c;
  Section m(root, "model");
  m.get("backend", c.backend);
  m.get("tabulated_path", c.tabulated_path);
  m.get("fit_degree", c.fit_degree);
  m.get("mass_u", c.mass);
  m.get("frequency_mhz", c.frequency_mhz);
  m.get("omega0_mhz", c.omega0_mhz);
  m.get("distance_um", c.distance);
  m.get("x_start_um", c.x_start);
  m.get("electrode_width_um", c.electrode_width);
  m.get("electrode_height_um", c.electrode_height);
  m.finish();
  Section t(root, "task");
  t.get("duration_us", c.duration);
  t.get("u_max_V", c.u_max);
  t.get("samples", c.samples);
  t.get("method", c.method);
  t.finish();
  Section g(root, "grid");
  g.get("points", c.grid.points);
  g.get("width_um", c.grid.width);
  g.get("width_sigma", c.grid_width_sigma);
  g.finish();
  Section co(root, "classical_oct");
  co.get("lambda_a", c.c_lambda);
  co.get("initial_step_V", c.c_initial_step);
  co.get("max_iterations", c.c_max_iterations);
  co.get("target_phonons", c.c_target_phonons);
  co.finish();
  Section qo(root, "quantum_oct");
  qo.get("lambda_a", c.q_lambda);
  qo.get("lambda_shrink", c.q_lambda_shrink);
  qo.get("max_iterations", c.q_max_iterations);
  qo.get("target_infidelity", c.q_target_infidelity);
  qo.finish();
  Section sc(root, "scan");
  sc.get("u_max_V", c.scan_u_max);
  sc.get("resolution_us", c.scan_resolution);
  sc.get("t_guess_us", c.scan_t_guess);
  sc.finish();
  Section st(root, "study");
  st.get("xi", c.xi);
  st.get("duration_us", c.xi_duration);
  st.get("grid_points", c.xi_grid_points);
  st.get("grid_width_sigma", c.xi_grid_width_sigma);
  st.get("xi_list", c.xi_list);
  st.get("lambda_list", c.lambda_list);
  st.get("iterations", c.study_iterations);
  st.finish();
  if (root.contains("seed")) c.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("jobs")) c.jobs = root["jobs"].get<int>();
  validate(c);
  return c;
}

TaskConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  return parse_config(text);
}

std::string config_json(const TaskConfig& c) {
  json j{{"schema_version", TaskConfig::kSchemaVersion},
         {"model",
          {{"backend", c.backend},
           {"tabulated_path", c.tabulated_path},
           {"fit_degree", c.fit_degree},
           {"mass_u", c.mass},
           {"frequency_mhz", c.frequency_mhz},
           {"omega0_mhz", c.omega0_mhz},
           {"distance_um", c.distance},
           {"x_start_um", c.x_start},
           {"electrode_width_um", c.electrode_width},
           {"electrode_height_um", c.electrode_height}}},
         {"task",
          {{"duration_us", c.duration},
           {"u_max_V", c.u_max},
           {"samples", c.samples},
           {"method", c.method}}},
         {"grid",
          {{"points", c.grid.points},
           {"width_um", c.grid.width},
           {"width_sigma", c.grid_width_sigma}}},
         {"classical_oct",
          {{"lambda_a", c.c_lambda},
           {"initial_step_V", c.c_initial_step},
           {"max_iterations", c.c_max_iterations},
           {"target_phonons", c.c_target_phonons}}},
         {"quantum_oct",
          {{"lambda_a", c.q_lambda},
           {"lambda_shrink", c.q_lambda_shrink},
           {"max_iterations", c.q_max_iterations},
           {"target_infidelity", c.q_target_infidelity}}},
         {"scan",
          {{"u_max_V", c.scan_u_max},
           {"resolution_us", c.scan_resolution},
           {"t_guess_us", c.scan_t_guess}}},
         {"study",
          {{"xi", c.xi},
           {"duration_us", c.xi_duration},
           {"grid_points", c.xi_grid_points},
           {"grid_width_sigma", c.xi_grid_width_sigma},
           {"xi_list", c.xi_list},
           {"lambda_list", c.lambda_list},
           {"iterations", c.study_iterations}}},
         {"seed", c.seed},
         {"jobs", c.jobs}};
  return j.dump(2) + "\n";
}

void validate(const TaskConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) fail(ErrorKind::config, std::string(what) + " must be positive");
  };
  if (c.backend != "harmonic" && c.backend != "surrogate" && c.backend != "tabulated")
    fail(ErrorKind::config, "backend must be harmonic, surrogate or tabulated");
  if (c.backend == "tabulated" && c.tabulated_path.empty())
    fail(ErrorKind::config, "tabulated backend needs tabulated_path");
  if (!kMethods.count(c.method))
    fail(ErrorKind::config,
         "method must be one of guess, classical-oct, quantum-oct, iea, bangbang");
  positive(c.mass, "mass");
  positive(c.frequency_mhz, "frequency");
  positive(c.omega0_mhz, "omega0");
  positive(c.distance, "distance");
  positive(c.electrode_width, "electrode width");
  positive(c.electrode_height, "electrode height");
  positive(c.duration, "duration");
  positive(c.u_max, "u_max");
  positive(c.scan_resolution, "scan resolution");
  positive(c.xi, "xi");
  positive(c.c_target_phonons, "target phonons");
  positive(c.q_lambda_shrink, "lambda_shrink");
  if (c.samples < 2) fail(ErrorKind::config, "samples must be >= 2");
  if (c.grid.points < 32 || (c.grid.points & (c.grid.points - 1)))
    fail(ErrorKind::config, "grid points must be a power of two >= 32");
  if (c.grid.width < 0.0) fail(ErrorKind::config, "grid width must be >= 0");
  if (c.c_max_iterations < 0 || c.q_max_iterations < 0)
    fail(ErrorKind::config, "iteration budgets must be >= 0");
  if (c.study_iterations <= 0) fail(ErrorKind::config, "study iterations must be > 0");
  for (double u : c.scan_u_max) positive(u, "scan u_max");
  for (double x : c.xi_list) positive(x, "xi_list entry");
  for (double l : c.lambda_list) positive(l, "lambda_list entry");
}

PotentialModel build_model(const TaskConfig& c) {
  if (c.backend == "harmonic") {
    HarmonicGeometry g;
    g.mass = c.mass;
    g.x1 = c.x_start;
    g.spacing = c.distance;
    g.omega0 = units::angular_mhz(c.omega0_mhz);
    g.margin = c.distance;
    return make_harmonic_model(g);
  }
  if (c.backend == "surrogate") {
    SurrogateGeometry g;
    g.mass = c.mass;
    g.x1 = c.x_start;
    g.spacing = c.distance;
    g.width = c.electrode_width;
    g.height = c.electrode_height;
    g.margin = 0.5 * c.distance;
    return make_surrogate_model(g);
  }
  const auto samples = read_tabulated_csv(c.tabulated_path);
  const TabulatedFit fit =
      fit_tabulated(samples, static_cast<std::size_t>(c.fit_degree));
  return PotentialModel({fit.first, fit.second}, c.mass,
                        {samples.front().x, samples.back().x});
}

OptimizationConfig classical_config(const TaskConfig& c) {
  OptimizationConfig o;
  o.lambda_a = c.c_lambda;
  o.initial_step = c.c_initial_step;
  o.max_iterations = c.c_max_iterations;
  o.target_phonons = c.c_target_phonons;
  o.u_max = c.u_max;
  o.omega = c.omega();
  o.x_start = c.x_start;
  o.x_target = c.x_target();
  return o;
}

QuantumOctConfig quantum_config(const TaskConfig& c) {
  QuantumOctConfig q;
  q.lambda_a = c.q_lambda;
  q.lambda_shrink = c.q_lambda_shrink;
  q.max_iterations = c.q_max_iterations;
  q.target_infidelity = c.q_target_infidelity;
  q.u_max = c.u_max;
  q.omega = c.omega();
  return q;
}

GridSpec grid_spec(const TaskConfig& c) {
  GridSpec g = c.grid;
  if (g.width == 0.0)
    g.width = c.grid_width_sigma * std::sqrt(units::hbar / (2.0 * c.mass * c.omega()));
  return g;
}

OptimizationReport classical_optimum(const PotentialModel& model,
                                     const TaskConfig& cfg, double T,
                                     double u_max) {
  OptimizationConfig o = classical_config(cfg);
  o.u_max = u_max;
  const auto tf = make_transport_function(cfg.x_start, cfg.x_target(), T);
  const VoltageRamp guess = guess_voltages(model, tf, cfg.omega(), cfg.samples);
  return optimize_classical(model, guess, o);
}

bool classical_feasible(const PotentialModel& model, const TaskConfig& cfg,
                        double T, double u_max, OptimizationReport* report) {
  try {
    OptimizationReport r = classical_optimum(model, cfg, T, u_max);
    const bool ok = r.converged;
    if (report) *report = std::move(r);
    return ok;
  } catch (const Error&) {
    return false;
  }
}

namespace {

// Bang-bang style estimate from the largest force the bound allows at
// the midpoint of the transport.
double force_limited_time(const PotentialModel& model, const TaskConfig& cfg,
                          double u_max) {
  const double mid = 0.5 * (cfg.x_start + cfg.x_target());
  double f = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i)
    f += std::abs(model.electrode(i).eval(mid).d1);
  const double a = units::volt_energy * u_max * f / model.mass();
  return 2.0 * std::sqrt(cfg.distance / a);
}

}  // namespace

std::vector<TminPoint> scan_tmin_classical(const PotentialModel& model,
                                           const TaskConfig& cfg,
                                           const std::vector<double>& u_max,
                                           int jobs) {
  if (u_max.empty()) fail(ErrorKind::domain, "U_max list is empty");
  auto one = [&](std::size_t i) -> TminPoint {
    const double u = u_max[i];
    const double start = cfg.scan_t_guess > 0.0
                             ? cfg.scan_t_guess * std::sqrt(10.0 / u)
                             : 1.1 * force_limited_time(model, cfg, u);
    double hi = start, lo = 0.0;
    int tries = 0;
    while (!classical_feasible(model, cfg, hi, u)) {
      lo = hi;
      hi *= 1.2;
      if (++tries > 12)
        fail(ErrorKind::divergence,
             "classical optimizer never converged for U_max = " + std::to_string(u));
    }
    if (lo == 0.0) {
      lo = hi;
      for (int k = 0; k < 30 && classical_feasible(model, cfg, lo, u); ++k) {
        hi = lo;
        lo *= 0.9;
      }
    }
    while (hi - lo > cfg.scan_resolution) {
      const double mid = 0.5 * (lo + hi);
      (classical_feasible(model, cfg, mid, u) ? hi : lo) = mid;
    }
    return {u, hi};
  };
  return parallel_map<TminPoint>(u_max.size(), jobs, one);
}

double quantum_excitation(const PotentialModel& model, const TaskConfig& cfg,
                          const VoltageRamp& ramp) {
  const GridSpec g = grid_spec(cfg);
  const MovingWavefunction psi0 = ground_state(model, ramp.row(0), cfg.x_start, g);
  // observables stay on: they carry the window-width guard
  const QuantumResult r = propagate_quantum(model, ramp, psi0);
  return excitation_energy(r.final_state, model, ramp.row(ramp.samples() - 1),
                           cfg.omega());
}

double scan_tmin_quantum(const PotentialModel& model, const TaskConfig& cfg,
                         double t_start, double step, double resolution) {
  auto passes = [&](double T) {
    OptimizationReport r;
    if (!classical_feasible(model, cfg, T, cfg.u_max, &r)) return false;
    try {
      return quantum_excitation(model, cfg, r.ramp) < cfg.c_target_phonons;
    } catch (const Error&) {
      return false;
    }
  };
  double lo = t_start, hi = t_start;
  for (int k = 0; !passes(hi); ++k) {
    if (k > 1000) fail(ErrorKind::divergence, "no quantum-feasible duration found");
    lo = hi;
    hi += step;
  }
  if (hi == t_start) return hi;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

PowerLawFit fit_power_law(const std::vector<TminPoint>& table) {
  if (table.size() < 3) fail(ErrorKind::domain, "power-law fit needs >= 3 points");
  std::set<double> distinct;
  const double n = static_cast<double>(table.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : table) {
    if (!(p.u_max > 0.0) || !(p.t_min > 0.0))
      fail(ErrorKind::domain, "power-law fit needs positive entries");
    distinct.insert(p.u_max);
    sx += std::log(p.u_max);
    sy += std::log(p.t_min);
  }
  if (distinct.size() < table.size())
    fail(ErrorKind::domain, "power-law fit needs distinct U_max values");
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : table) {
    const double dx = std::log(p.u_max) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.t_min) - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double rss = 0.0;
  for (const auto& p : table) {
    const double r = std::log(p.t_min) - (icpt + slope * std::log(p.u_max));
    rss += r * r;
  }
  const double s2 = rss / (n - 2.0);
  const double se_slope = std::sqrt(s2 / sxx);
  const double se_icpt = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  const double a = std::exp(icpt);
  return {a, -slope, a * se_icpt, se_slope, std::sqrt(rss / n)};
}

std::string fit_json(const PowerLawFit& f) {
  return json{{"a_us", f.a}, {"b", f.b}, {"a_err_us", f.a_err},
              {"b_err", f.b_err}, {"rms_log_residual", f.residual}}
             .dump(2) + "\n";
}

double xi_duration(const TaskConfig& cfg) {
  if (cfg.xi_duration > 0.0) return cfg.xi_duration;
  TaskConfig ref = cfg;
  ref.backend = "surrogate";
  ref.distance = SurrogateGeometry{}.spacing;
  ref.x_start = 0.0;
  const PotentialModel m = build_model(ref);
  const auto tf = make_transport_function(0.0, ref.distance, 1.0);
  return iea_tmin_scan(m, cfg.omega(), {cfg.u_max}, tf, cfg.samples).front().t_min;
}

XiTask build_xi_task(const TaskConfig& cfg, double xi,
                     const VoltageRamp& seed_280) {
  GridSpec g;
  g.points = cfg.xi_grid_points;
  g.width = cfg.xi_grid_width_sigma *
            std::sqrt(units::hbar / (2.0 * cfg.mass * cfg.omega()));
  return make_xi_task(xi, cfg.omega(), seed_280, cfg.u_max, g);
}

namespace {

namespace fs = std::filesystem;

std::vector<double> grid_of(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) v.push_back(lo + step * k);
  return v;
}

double nan_on_error(const std::function<double()>& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

TaskConfig reference_surrogate(const TaskConfig& cfg) {
  TaskConfig r = cfg;
  r.backend = "surrogate";
  r.distance = SurrogateGeometry{}.spacing;
  r.x_start = 0.0;
  return r;
}

void fig3(const TaskConfig& cfg, const fs::path& out) {
  const PotentialModel model = build_model(cfg);
  const double w = cfg.omega();
  // guess ramps, classical dynamics, fine grid
  const auto ts = grid_of(0.2, 4.0, 0.005);
  auto guess = parallel_map<std::vector<double>>(ts.size(), cfg.jobs, [&](std::size_t i) {
    const double T = ts[i];
    const double n = nan_on_error([&] {
      const auto tf = make_transport_function(cfg.x_start, cfg.x_target(), T);
      const auto r = guess_voltages(model, tf, w, cfg.samples);
      const auto tr = propagate_classical(model, r, cfg.x_start, 0.0, Integrator::dopri5);
      return final_energy(tr, model.mass(), w, cfg.x_target()).phonons;
    });
    return std::vector<double>{T, n};
  });
  csv::write((out / "guess_energy.csv").string(), {"T_us", "guess_phonons"}, guess);
  const auto to = grid_of(0.2, 1.5, 0.05);
  const std::vector<double> bounds{10.0, 20.0, 30.0};
  auto opt = parallel_map<std::vector<double>>(to.size(), cfg.jobs, [&](std::size_t i) {
    std::vector<double> row{to[i]};
    for (double u : bounds)
      row.push_back(nan_on_error([&] {
        return classical_optimum(model, cfg, to[i], u).final_phonons;
      }));
    return row;
  });
  csv::write((out / "optimized_energy.csv").string(),
             {"T_us", "opt10V_phonons", "opt20V_phonons", "opt30V_phonons"}, opt);
}

void fig4(const TaskConfig& cfg, const fs::path& out) {
  const PotentialModel model = build_model(cfg);
  const auto scan = scan_tmin_classical(model, cfg, cfg.scan_u_max, cfg.jobs);
  write_scan_csv((out / "tmin_classical.csv").string(), scan);
  std::ofstream((out / "fit.json").string()) << fit_json(fit_power_law(scan));
  std::vector<std::vector<double>> bb;
  for (double u : cfg.scan_u_max)
    bb.push_back({u, bangbang_solution(units::angular_mhz(cfg.omega0_mhz), u,
                                       cfg.x_start, cfg.x_target())
                         .t_min});
  csv::write((out / "tmin_bangbang.csv").string(), {"umax_V", "tmin_us"}, bb);
}

void fig5(const TaskConfig& cfg, const fs::path& out) {
  const PotentialModel model = build_model(cfg);
  const double w = cfg.omega();
  const auto ts = grid_of(0.2, 1.5, 0.05);
  auto rows = parallel_map<std::vector<double>>(ts.size(), cfg.jobs, [&](std::size_t i) {
    const double T = ts[i];
    const auto tf = make_transport_function(cfg.x_start, cfg.x_target(), T);
    const double g = nan_on_error([&] {
      return quantum_excitation(model, cfg, guess_voltages(model, tf, w, cfg.samples));
    });
    double oc = std::numeric_limits<double>::quiet_NaN(), oq = oc;
    OptimizationReport r;
    if (classical_feasible(model, cfg, T, cfg.u_max, &r)) {
      oc = r.final_phonons;
      oq = nan_on_error([&] { return quantum_excitation(model, cfg, r.ramp); });
    }
    const double iq = nan_on_error([&] {
      return quantum_excitation(model, cfg, iea_ramp(model, tf, w, cfg.samples).total);
    });
    return std::vector<double>{T, g, oq, iq, oc};
  });
  csv::write((out / "excitation.csv").string(),
             {"T_us", "guess_quantum_phonons", "opt_quantum_phonons",
              "iea_quantum_phonons", "opt_classical_phonons"},
             rows);
}

void fig6(const TaskConfig& cfg, const fs::path& out) {
  const PotentialModel model = build_model(cfg);
  const auto tf = make_transport_function(cfg.x_start, cfg.x_target(), 1.0);
  write_scan_csv((out / "tmin_iea.csv").string(),
                 iea_tmin_scan(model, cfg.omega(), cfg.scan_u_max, tf, cfg.samples));
  write_scan_csv((out / "tmin_iea_omega0.csv").string(),
                 iea_tmin_scan(model, 0.0, cfg.scan_u_max, tf, cfg.samples));
  write_scan_csv((out / "tmin_classical.csv").string(),
                 scan_tmin_classical(model, cfg, cfg.scan_u_max, cfg.jobs));
}

void fig7(const TaskConfig& cfg, const fs::path& out) {
  const TaskConfig ref = reference_surrogate(cfg);
  const PotentialModel base = build_model(ref);
  const double T = xi_duration(cfg);
  const OptimizationReport seed = classical_optimum(base, ref, T, cfg.u_max);
  if (!seed.converged)
    fail(ErrorKind::divergence, "classical seed did not converge");

  std::vector<XiTask> tasks;
  for (double xi : cfg.xi_list) tasks.push_back(build_xi_task(cfg, xi, seed.ramp));
  write_study_csv((out / "convergence.csv").string(),
                  convergence_study(tasks, cfg.lambda_list, cfg.study_iterations,
                                    cfg.jobs));

  // table rows and final amplitudes at cfg.xi
  std::vector<std::vector<double>> table;
  const double s0 = std::sqrt(units::hbar / (2.0 * cfg.mass * cfg.omega()));
  for (double xi : std::vector<double>{5e-5, 5e-2, cfg.xi}) {
    const PotentialModel m = make_xi_model(xi, cfg.omega(), cfg.mass);
    const auto tf = make_transport_function(0.0, m.spacing(), T);
    const IEARamp iea = iea_ramp(m, tf, cfg.omega(), cfg.samples);
    table.push_back({xi, force_inhomogeneity(m, iea, tf, s0),
                     phase_space_volume(m, cfg.omega())});
  }
  csv::write((out / "force_inhomogeneity.csv").string(),
             {"xi", "dF_over_F", "phase_space_volume_h"}, table);

  XiTask task = build_xi_task(cfg, cfg.xi, seed.ramp);
  const auto tf = make_transport_function(0.0, task.model.spacing(), T);
  const IEARamp iea = iea_ramp(task.model, tf, cfg.omega(), cfg.samples);
  QuantumOctConfig qc = quantum_config(cfg);
  qc.u_max = task.u_max;
  const OptimizationReport q =
      optimize_quantum(task.model, task.seed, task.psi0, task.target, qc);
  QuantumOptions o;
  o.record_observables = false;
  const MovingWavefunction fc = propagate_quantum(task.model, task.seed, task.psi0, o).final_state;
  const MovingWavefunction fi = propagate_quantum(task.model, iea_control(task.model, tf, cfg.omega()),
                                                  T, cfg.samples - 1, task.psi0, o).final_state;
  const MovingWavefunction fq = propagate_quantum(task.model, q.ramp, task.psi0, o).final_state;
  std::vector<std::vector<double>> fid{{cfg.xi, fidelity(fc, task.target),
                                        fidelity(fi, task.target), q.final_fidelity}};
  csv::write((out / "fidelities.csv").string(),
             {"xi", "classical_fidelity", "iea_fidelity", "qoct_fidelity"}, fid);

  // |psi|^2 on the target window
  const FourierGrid grid(task.target.size(), task.target.width);
  std::vector<std::vector<double>> amp;
  const auto ac = to_frame(fc, task.target, grid, nullptr);
  const auto ai = to_frame(fi, task.target, grid, nullptr);
  const auto aq = to_frame(fq, task.target, grid, nullptr);
  for (std::size_t j = 0; j < grid.size(); ++j)
    amp.push_back({task.target.x_cl + grid.y()[j], std::norm(ac[j]), std::norm(ai[j]),
                   std::norm(aq[j]), std::norm(task.target.psi[j])});
  csv::write((out / "final_amplitudes.csv").string(),
             {"x_um", "classical", "iea", "qoct", "target"}, amp);
  std::ofstream((out / "qoct_report.json").string()) << report_json(q, config_json(cfg));
}

}  // namespace

void reproduce(const std::string& figure, const TaskConfig& cfg,
               const std::string& out_dir) {
  static const std::set<std::string> ids{"fig3", "fig4", "fig5", "fig6", "fig7"};
  if (!ids.count(figure))
    fail(ErrorKind::config, "unknown figure id " + figure +
                                " (expected fig3, fig4, fig5, fig6 or fig7)");
  const fs::path out = fs::path(out_dir) / figure;
  fs::create_directories(out);
  std::ofstream(out / "config.json") << config_json(cfg);
  if (figure == "fig3") fig3(cfg, out);
  if (figure == "fig4") fig4(cfg, out);
  if (figure == "fig5") fig5(cfg, out);
  if (figure == "fig6") fig6(cfg, out);
  if (figure == "fig7") fig7(cfg, out);
}

}  // namespace shuttle
