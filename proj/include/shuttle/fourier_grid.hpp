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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace shuttle {

using cplx = std::complex<double>;

// Uniform periodic grid y_j = (j - N/2) dx with FFTW transforms. Each
// instance owns its plans and scratch buffer; copies re-plan, so give
// every concurrent propagation its own instance.
class FourierGrid {
 public:
  FourierGrid(std::size_t points, double width);
  FourierGrid(const FourierGrid& other);
  FourierGrid& operator=(const FourierGrid& other);
  ~FourierGrid();

  std::size_t size() const { return n_; }
  double width() const { return width_; }
  double dx() const { return width_ / static_cast<double>(n_); }
  double dk() const;
  double k_max() const;
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& k() const { return k_; }

  // Unnormalized forward transform, then scaled inverse.
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void backward(std::span<const cplx> in, std::span<cplx> out) const;

  // psi(y) -> psi(y + shift) by a spectral phase.
  void translate(std::span<cplx> psi, double shift) const;

 private:
  void plan();
  void release();
  std::size_t n_;
  double width_;
  std::vector<double> y_, k_;
  cplx* buf_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace shuttle
