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
#include <complex>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shuttle/errors.hpp"
#include "shuttle/fourier_grid.hpp"
#include "shuttle/quantum_sim.hpp"
#include "shuttle/units.hpp"

using namespace shuttle;

namespace {

const double kW = units::angular_mhz(1.3);
const double kS0 = std::sqrt(oracle::hbar / (2 * 40 * kW));

struct Harmonic {
  PotentialModel model = make_harmonic_model();
  std::vector<double> volts{calibrate_bias(model, 0, kW), 0.0};
};

// Ground state displaced by `delta` (same window).
MovingWavefunction displaced(const MovingWavefunction& g, double delta) {
  MovingWavefunction c = g;
  c.x_cl += delta;
  return c;
}

double lab_overlap_oracle(const MovingWavefunction& psi, double c) {
  // |<gaussian at c | psi>|^2 on the window grid
  std::complex<double> acc = 0.0;
  const double dx = psi.dx();
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double y = (static_cast<double>(j) - psi.size() / 2.0) * dx;
    const double x = psi.x_cl + y;
    const auto lab = std::exp(std::complex<double>(0, psi.phase + psi.p_cl * y / oracle::hbar)) * psi.psi[j];
    acc += std::conj(oracle::gaussian(x, c, 40, kW)) * lab * dx;
  }
  return std::norm(acc);
}

}  // namespace

TEST_SUITE("quantum_sim") {

TEST_CASE("fourier grid transforms and translation") {
  FourierGrid g(256, 20.0);
  std::vector<cplx> f(256), F(256), b(256);
  for (std::size_t j = 0; j < 256; ++j) f[j] = std::exp(-g.y()[j] * g.y()[j]);
  g.forward(f, F);
  g.backward(F, b);
  for (std::size_t j = 0; j < 256; ++j) CHECK(std::abs(b[j] - f[j]) < 1e-14);
  g.translate(f, 0.3);
  for (std::size_t j = 0; j < 256; ++j)
    CHECK(std::abs(f[j] - std::exp(-std::pow(g.y()[j] + 0.3, 2))) < 1e-12);
  CHECK(g.k_max() == doctest::Approx(units::pi / g.dx()));
  CHECK_THROWS_AS(FourierGrid(100, 1.0), Error);
}

TEST_CASE("ground state of the harmonic well") {
  Harmonic h;
  const auto g = ground_state(h.model, h.volts, 3.0);
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(g.width == doctest::Approx(16 * kS0).epsilon(1e-6));
  CHECK(g.x_cl == doctest::Approx(0.0).scale(1.0));
  CHECK(lab_overlap_oracle(g, 0.0) > 1 - 1e-12);
  QuantumStepper st(h.model, g.size(), g.width);
  st.set_potential(h.volts, g.x_cl, 0.0);
  CHECK(st.energy(g.psi) == doctest::Approx(0.5 * oracle::hbar * kW).epsilon(1e-10));
  CHECK(std::abs(excitation_energy(g, h.model, h.volts, kW)) < 1e-10);
  const auto e1 = oscillator_state(h.model, h.volts, 0.0, 1);
  CHECK(std::abs(overlap(e1, g).value) < 1e-12);
  CHECK(excitation_energy(e1, h.model, h.volts, kW) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stationary state keeps its autocorrelation") {
  for (bool harmonic : {true, false}) {
    CAPTURE(harmonic);
    const auto m = harmonic ? make_harmonic_model() : make_surrogate_model();
    const std::vector<double> v{calibrate_bias(m, 0, kW), 0.0};
    const auto g = ground_state(m, v, 0.0);
    const auto r = evolve_static(m, v, g, 2.0, 1000);
    CHECK(fidelity(r.final_state, g) > 1 - 1e-9);
    CHECK(r.max_norm_drift < 1e-10);
  }
}

TEST_CASE("coherent state follows the classical orbit") {
  Harmonic h;
  const auto g = ground_state(h.model, h.volts, 0.0, {256, 32 * kS0});
  const double d = 3.0 * kS0;
  for (bool moving : {true, false}) {
    CAPTURE(moving);
    QuantumOptions o;
    o.moving = moving;
    o.omega = kW;
    const auto r = evolve_static(h.model, h.volts, displaced(g, d), 1.0, 1000, o);
    double worst = 0.0;
    for (const auto& s : r.series) worst = std::max(worst, std::abs(s.x_mean - d * std::cos(kW * s.t)));
    CHECK(worst < 1e-6 * d);
    CHECK(r.max_norm_drift < 1e-10);
    // |alpha|^2 = d^2 / 4 sigma0^2 phonons, constant in time
    CHECK(r.series.back().excitation == doctest::Approx(d * d / (4 * kS0 * kS0)).epsilon(1e-8));
    CHECK(r.series.back().uncertainty == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("moving and static windows agree") {
  Harmonic h;
  const double L = 256 * kS0;
  const double shift = 0.35 * L;
  // slow enough that the final overlap is far from both 0 and 1
  const auto tf = make_transport_function(-0.5 * shift, 0.5 * shift, 2.5);
  const auto ramp = guess_voltages(h.model, tf, kW, 600);
  const auto g_static = ground_state(h.model, ramp.row(0), -0.5 * shift, {1024, L});
  const auto g_moving = ground_state(h.model, ramp.row(0), -0.5 * shift, {128, 16 * kS0});
  const auto t_static = ground_state(h.model, ramp.row(599), 0.5 * shift, {1024, L});
  const auto t_moving = ground_state(h.model, ramp.row(599), 0.5 * shift, {128, 16 * kS0});
  QuantumOptions mov;
  mov.substeps = 128;  // the static reference carries an O(h^2) step error
  QuantumOptions stat = mov;
  stat.moving = false;
  const double Fs = fidelity(propagate_quantum(h.model, ramp, g_static, stat).final_state, t_static);
  const double Fm = fidelity(propagate_quantum(h.model, ramp, g_moving, mov).final_state, t_moving);
  CHECK(Fm > 0.5);
  CHECK(Fm < 0.99);
  CHECK(std::abs(Fs - Fm) < 1e-8);
}

TEST_CASE("frames, overlaps and phases") {
  Harmonic h;
  auto a = ground_state(h.model, h.volts, 0.0);
  // the same lab state described from a shifted, boosted frame
  MovingWavefunction b = a;
  b.x_cl = 0.01;
  b.p_cl = 0.2;
  b.phase = 0.7;
  const double dx = a.dx();
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double y = (static_cast<double>(j) - a.size() / 2.0) * dx;
    const double x = b.x_cl + y;
    b.psi[j] = std::exp(std::complex<double>(0, -b.phase - b.p_cl * y / oracle::hbar)) *
               oracle::gaussian(x, 0.0, 40, kW);
  }
  const Overlap ov = overlap(a, b);
  CHECK(!ov.disjoint);
  CHECK(std::abs(ov.value) == doctest::Approx(1.0).epsilon(1e-9));
  MovingWavefunction c = b;
  c.phase += 0.3;
  CHECK(std::abs(overlap(b, c).value - std::polar(1.0, 0.3)) < 1e-12);
  MovingWavefunction far = a;
  far.x_cl = 50.0;
  CHECK(overlap(a, far).disjoint);
  CHECK(fidelity(a, far) == 0.0);
}

TEST_CASE("squeezing diagnostics in the final well") {
  Harmonic h;
  const auto g = ground_state(h.model, h.volts, 0.0);
  const auto dg = final_well_diagnostics(g, h.model, h.volts, kW);
  CHECK(dg.min_uncertainty == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(!dg.squeezed);
  // ground state of a stiffer well is squeezed in the calibrated one
  const std::vector<double> stiff{1.5 * h.volts[0], 0.0};
  const auto s = ground_state(h.model, stiff, 0.0, {128, g.width});
  const auto ds = final_well_diagnostics(s, h.model, h.volts, kW);
  CHECK(ds.squeezed);
  CHECK(ds.dp_oscillation > 0.1);
  CHECK(ds.min_uncertainty == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("too small a window is reported") {
  Harmonic h;
  const auto g = ground_state(h.model, h.volts, 0.0);
  // release into a much softer well: the packet spreads past L/12
  const std::vector<double> soft{0.01 * h.volts[0], 0.0};
  CHECK_THROWS_AS(evolve_static(h.model, soft, g, 2.0, 200), Error);
  MovingWavefunction bad = g;
  bad.psi[bad.size() / 2] *= 1.01;
  CHECK_THROWS_AS(evolve_static(h.model, h.volts, bad, 0.1, 10), Error);
}

}
