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

#include "shuttle/errors.hpp"

#include <sstream>

namespace shuttle {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::calibration: return "calibration error";
    case ErrorKind::fit: return "fit error";
    case ErrorKind::degenerate_geometry: return "degenerate geometry";
    case ErrorKind::escape: return "escape";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::no_window: return "no stability window";
    case ErrorKind::grid_too_small: return "grid too small";
    case ErrorKind::propagation_accuracy: return "propagation accuracy";
    case ErrorKind::guess_too_poor: return "guess too poor";
    case ErrorKind::undefined_ratio: return "undefined ratio";
    case ErrorKind::no_minimum: return "no local minimum";
    case ErrorKind::config: return "configuration error";
  }
  return "error";
}

namespace {
std::string escape_message(double t, double x) {
  std::ostringstream ss;
  ss << "ion left the working window at t=" << t << " us (x=" << x << " um)";
  return ss.str();
}
}  // namespace

EscapeError::EscapeError(double t, double x)
    : Error(ErrorKind::escape, escape_message(t, x)), t_(t), x_(x) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace shuttle
