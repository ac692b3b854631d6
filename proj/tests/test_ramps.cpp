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
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/ramps.hpp"
#include "shuttle/units.hpp"

using namespace shuttle;

TEST_SUITE("ramps") {

TEST_CASE("default transport function is the quintic") {
  const auto tf = make_transport_function(0.0, 280.0, 0.4);
  for (double s : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    CHECK(tf.position(s * 0.4) == doctest::Approx(280.0 * oracle::quintic(s)).epsilon(1e-13));
    CHECK(tf.acceleration(s * 0.4) ==
          doctest::Approx(280.0 * oracle::quintic_dd(s) / 0.16).epsilon(1e-12).scale(1.0));
  }
  CHECK(tf.velocity(0.0) == 0.0);
  CHECK(tf.velocity(0.4) == doctest::Approx(0.0).scale(1.0));
  CHECK(tf.acceleration(0.4) == doctest::Approx(0.0).scale(1e-9));
  // extremum of 60 s - 180 s^2 + 120 s^3 at s = 1/2 - sqrt(3)/6
  CHECK(tf.peak_acceleration_time() / 0.4 ==
        doctest::Approx(0.5 - std::sqrt(3.0) / 6.0).epsilon(1e-6));
}

TEST_CASE("custom shapes must satisfy the boundary conditions") {
  CHECK_THROWS_AS(TransportFunction(0, 1, 1, {0, 1}), Error);
  CHECK_THROWS_AS(TransportFunction(0, 1, -1), Error);
  // 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7 also has zero jerk at the ends
  TransportFunction f(0, 1, 2, {0, 0, 0, 0, 35, -84, 70, -20});
  CHECK(f.position(1.0) == doctest::Approx(0.5));
  CHECK(f.with_duration(4).position(2.0) == doctest::Approx(0.5));
}

TEST_CASE("voltage ramp grid, interpolation and clamp") {
  VoltageRamp r(1.0, 11, 2);
  for (std::size_t k = 0; k < 11; ++k) {
    r(k, 0) = static_cast<double>(k);
    r(k, 1) = -2.0 * static_cast<double>(k);
  }
  CHECK(r.time(10) == 1.0);
  CHECK(r.dt() == doctest::Approx(0.1));
  const auto v = r.sample(0.35);
  CHECK(v[0] == doctest::Approx(3.5));
  CHECK(v[1] == doctest::Approx(-7.0));
  CHECK_THROWS_AS(r.sample(1.5), Error);
  CHECK(r.max_abs() == 20.0);
  r.clamp(5.0);
  CHECK(r.max_abs() == 5.0);
  CHECK(r(9, 0) == 5.0);
  CHECK(r(1, 1) == -2.0);
  CHECK(r.clamp_value(-9.0) == -5.0);
  const VoltageRamp s = r.stretched(2.0);
  CHECK(s.duration() == 2.0);
  CHECK(s(4, 0) == r(4, 0));
}

TEST_CASE("symmetry defect of a mirrored ramp") {
  VoltageRamp r(1.0, 21, 2);
  for (std::size_t k = 0; k < 21; ++k) {
    const double t = r.time(k);
    r(k, 0) = std::sin(t) + t * t;
    r(k, 1) = std::sin(1.0 - t) + (1.0 - t) * (1.0 - t);
  }
  CHECK(r.symmetry_defect() < 1e-14);
  r(3, 1) += 0.01;
  CHECK(r.symmetry_defect() == doctest::Approx(0.01));
}

TEST_CASE("guess voltages hold a static well at alpha(t)") {
  const auto m = make_surrogate_model();
  const double w = units::angular_mhz(1.3);
  const auto tf = make_transport_function(0.0, 280.0, 0.3);
  const VoltageRamp g = guess_voltages(m, tf, w, 201);
  for (std::size_t k : {0ul, 37ul, 100ul, 200ul}) {
    const double alpha = tf.position(g.time(k));
    const Jet v = eval_potential(m, g.row(k), alpha);
    CHECK(v.d1 == doctest::Approx(0.0).scale(1e-3 * 40.0 * w * w));
    CHECK(v.d2 == doctest::Approx(40.0 * w * w).epsilon(1e-10));
  }
  CHECK(g.symmetry_defect() < 1e-9);
}

TEST_CASE("degenerate geometry is rejected") {
  // both electrodes at the same curvature center cannot move a well
  std::vector<ElectrodePotential> e{ElectrodePotential::harmonic(0, 1),
                                    ElectrodePotential::harmonic(1e-300, 1)};
  PotentialModel m(e, 40, {-10, 10});
  const auto tf = make_transport_function(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(guess_voltages(m, tf, 1.0, 50), Error);
}

TEST_CASE("ramp csv round trip is exact") {
  VoltageRamp r(0.3, 7, 2);
  for (std::size_t k = 0; k < 7; ++k) {
    r(k, 0) = 1.0 / (k + 3.0);
    r(k, 1) = -std::exp(0.1 * k);
  }
  const auto path = (std::filesystem::temp_directory_path() / "shuttle_ramp.csv").string();
  write_ramp_csv(path, r);
  const VoltageRamp b = read_ramp_csv(path);
  REQUIRE(b.samples() == 7);
  CHECK(b.duration() == r.duration());
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(b(k, 0) == r(k, 0));
    CHECK(b(k, 1) == r(k, 1));
  }
}

}
