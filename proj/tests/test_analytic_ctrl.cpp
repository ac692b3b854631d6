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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shuttle/analytic_ctrl.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/quantum_sim.hpp"
#include "shuttle/units.hpp"

using namespace shuttle;

namespace {
const double kW0 = units::angular_mhz(0.55);
const double kW = units::angular_mhz(1.3);
}  // namespace

TEST_SUITE("analytic_ctrl") {

TEST_CASE("bang-bang closed form") {
  const auto s = bangbang_solution(kW0, 1.0, 0.0, 280.0);
  CHECK(s.t_min == doctest::Approx(std::sqrt(2.0) / kW0).epsilon(1e-14));
  CHECK(s.t_sw == s.t_min / 2);
  CHECK(s.position(s.t_sw) == doctest::Approx(140.0));
  CHECK(s.position(s.t_min) == doctest::Approx(280.0));
  CHECK(s.velocity(s.t_min) == doctest::Approx(0.0).scale(1.0));
  // u^-1/2 scaling
  CHECK(bangbang_solution(kW0, 4.0, 0.0, 280.0).t_min == doctest::Approx(s.t_min / 2));
  std::vector<double> u(2);
  s.control(0.1, u);
  CHECK(u[0] == 1.0);
  CHECK(u[1] == -1.0);
  s.control(0.3, u);
  CHECK(u[0] == -1.0);
  CHECK_THROWS_AS(bangbang_solution(kW0, -1.0, 0.0, 280.0), Error);
}

TEST_CASE("bang-bang control brings the ion to rest") {
  const auto s = bangbang_solution(kW0, 1.0, 0.0, 280.0);
  const auto m = bangbang_model(kW0, 0.0, 280.0);
  ControlFunction c = [&](double t, std::span<double> u) { s.control(t, u); };
  const std::vector<double> bp{s.t_sw};
  const auto tr = propagate_classical(m, c, s.t_min, 101, bp, 0.0, 0.0);
  for (std::size_t k = 0; k < tr.size(); k += 10)
    CHECK(tr.x[k] == doctest::Approx(s.position(tr.t[k])).scale(280.0).epsilon(1e-9));
  CHECK(std::abs(tr.final_state().v) < 1e-7);
  const auto bb = bangbang(kW0, 1.0, 0.0, 280.0, 2001);
  CHECK(bb.ramp.samples() == 2001);
  CHECK(bb.ramp(0, 0) == 1.0);
  CHECK(bb.ramp(2000, 0) == -1.0);
}

TEST_CASE("IEA voltages satisfy force and curvature balance") {
  const auto m = make_surrogate_model();
  const auto tf = make_transport_function(0, 280, 0.5);
  const auto r = iea_ramp(m, tf, kW, 400);
  const oracle::Strip a{0, 240, 295}, b{280, 240, 295};
  for (std::size_t k : {0ul, 50ul, 123ul, 399ul}) {
    const double t = r.total.time(k), x = tf.position(t);
    const double u1 = r.total(k, 0), u2 = r.total(k, 1);
    const double force = -oracle::qe * (u1 * a.d1(x) + u2 * b.d1(x));
    const double curv = oracle::qe * (u1 * a.d2(x) + u2 * b.d2(x));
    CHECK(force == doctest::Approx(40 * tf.acceleration(t)).scale(1e-6 * 40 * 280 / 0.25));
    CHECK(curv == doctest::Approx(40 * kW * kW).epsilon(1e-9));
    CHECK(u1 == doctest::Approx(r.base(k, 0) + r.compensation(k, 0)));
  }
  const auto c = iea_compensation(m, tf, 0.1);
  std::vector<double> u(2);
  iea_control(m, tf, kW)(0.1, u);
  CHECK(u[0] == doctest::Approx(r.total.sample(0.1)[0]).epsilon(1e-4));
  CHECK(c[0] == doctest::Approx(r.compensation.sample(0.1)[0]).epsilon(1e-4));
  CHECK(r.max_abs == doctest::Approx(r.total.max_abs()));
  // free-flight limit carries no trapping part
  const auto z = iea_ramp(m, tf, 0.0, 100);
  CHECK(z.base.max_abs() == 0.0);
}

TEST_CASE("IEA transport is exact in the harmonic model") {
  const auto m = make_harmonic_model();
  const auto tf = make_transport_function(0, 280, 0.4);
  const std::vector<double> u0{calibrate_bias(m, 0, kW), 0.0};
  const auto psi0 = ground_state(m, u0, 0.0);
  const auto r = propagate_quantum(m, iea_control(m, tf, kW), 0.4, 1000, psi0);
  // target: ground state of the final well
  std::vector<double> u1(2);
  iea_control(m, tf, kW)(0.4, u1);
  const auto target = ground_state(m, u1, 280.0);
  CHECK(1.0 - fidelity(r.final_state, target) < 1e-9);
  CHECK(r.max_norm_drift < 1e-10);
}

TEST_CASE("IEA minimum time scan") {
  const auto m = make_harmonic_model();
  const auto fam = make_transport_function(0, 280, 1.0);
  const std::vector<double> us{10, 20, 40, 80};
  const auto scan = iea_tmin_scan(m, 0.0, us, fam, 500, 1e-6);
  std::vector<double> lx, ly;
  for (const auto& p : scan) {
    lx.push_back(std::log(p.u_max));
    ly.push_back(std::log(p.t_min));
    const auto ok = iea_ramp(m, fam.with_duration(p.t_min), 0.0, 500);
    CHECK(ok.max_abs <= p.u_max * (1 + 1e-12));
    const auto bad = iea_ramp(m, fam.with_duration(p.t_min - 2e-6), 0.0, 500);
    CHECK(bad.max_abs > p.u_max);
  }
  CHECK(-oracle::ols_slope(lx, ly) == doctest::Approx(0.5).epsilon(1e-4));
}

}
