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

#include <stdexcept>
#include <string>

namespace shuttle {

enum class ErrorKind {
  domain,
  calibration,
  fit,
  degenerate_geometry,
  escape,
  divergence,
  no_window,
  grid_too_small,
  propagation_accuracy,
  guess_too_poor,
  undefined_ratio,
  no_minimum,
  config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown when a trajectory leaves the working window.
class EscapeError : public Error {
 public:
  EscapeError(double t, double x);
  double time() const { return t_; }
  double position() const { return x_; }

 private:
  double t_;
  double x_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace shuttle
