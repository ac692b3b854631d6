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

#include "shuttle/fourier_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "shuttle/errors.hpp"
#include "shuttle/units.hpp"

namespace shuttle {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FourierGrid::FourierGrid(std::size_t points, double width)
    : n_(points), width_(width) {
  if (points < 2 || (points & (points - 1)) != 0)
    fail(ErrorKind::domain, "grid size must be a power of two");
  if (!(width > 0.0)) fail(ErrorKind::domain, "grid width must be positive");
  y_.resize(n_);
  k_.resize(n_);
  const double h = dx();
  for (std::size_t j = 0; j < n_; ++j) {
    y_[j] = (static_cast<double>(j) - static_cast<double>(n_ / 2)) * h;
    const long m = j < n_ / 2 ? static_cast<long>(j)
                              : static_cast<long>(j) - static_cast<long>(n_);
    k_[j] = dk() * static_cast<double>(m);
  }
  plan();
}

FourierGrid::FourierGrid(const FourierGrid& o)
    : n_(o.n_), width_(o.width_), y_(o.y_), k_(o.k_) {
  plan();
}

FourierGrid& FourierGrid::operator=(const FourierGrid& o) {
  if (this != &o) {
    release();
    n_ = o.n_;
    width_ = o.width_;
    y_ = o.y_;
    k_ = o.k_;
    plan();
  }
  return *this;
}

FourierGrid::~FourierGrid() { release(); }

void FourierGrid::plan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * n_));
  auto* b = reinterpret_cast<fftw_complex*>(buf_);
  const int n = static_cast<int>(n_);
  fwd_ = fftw_plan_dft_1d(n, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(n, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

void FourierGrid::release() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  if (buf_) fftw_free(buf_);
  fwd_ = bwd_ = nullptr;
  buf_ = nullptr;
}

double FourierGrid::dk() const { return 2.0 * units::pi / width_; }
double FourierGrid::k_max() const { return units::pi / dx(); }

void FourierGrid::forward(std::span<const cplx> in, std::span<cplx> out) const {
  std::copy(in.begin(), in.end(), buf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::copy(buf_, buf_ + n_, out.begin());
}

void FourierGrid::backward(std::span<const cplx> in,
                           std::span<cplx> out) const {
  std::copy(in.begin(), in.end(), buf_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double s = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = buf_[j] * s;
}

void FourierGrid::translate(std::span<cplx> psi, double shift) const {
  if (shift == 0.0) return;
  std::copy(psi.begin(), psi.end(), buf_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  for (std::size_t j = 0; j < n_; ++j) {
    const double a = k_[j] * shift;
    // The Nyquist mode is the symmetric cosine of +-k_max.
    buf_[j] *= j == n_ / 2 ? cplx(std::cos(a), 0.0)
                           : cplx(std::cos(a), std::sin(a));
  }
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double s = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) psi[j] = buf_[j] * s;
}

}  // namespace shuttle
