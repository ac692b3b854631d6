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

#include <numbers>

// Internal units: micrometre, microsecond, atomic mass unit, volt.
// Energies come out in u*um^2/us^2.
namespace shuttle::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar = 0.0635077993;          // u um^2 / us
inline constexpr double volt_energy = 9.648533212e7;  // e * 1 V
inline constexpr double mass_ca40 = 40.0;

constexpr double angular_mhz(double f_mhz) { return 2.0 * pi * f_mhz; }

}  // namespace shuttle::units
