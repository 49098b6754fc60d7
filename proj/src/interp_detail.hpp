/*
 * Copyright 2026 The tpseg authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shared multilinear interpolation kernels. Coordinates are clamped to
// [0, n-1] per axis; the weight form (1-t)*a + t*b keeps exact node queries
// exact. Gradients are the in-cell slopes, zeroed on axes whose raw
// coordinate fell strictly outside the domain (the clamped value is constant
// there).

#ifndef TPSEG_INTERP_DETAIL_HPP
#define TPSEG_INTERP_DETAIL_HPP

#include <algorithm>
#include <cmath>

namespace tpseg::detail {

struct AxisPos {
  int cell;      // base node index, in [0, n-2]
  double t;      // offset within the cell, in [0, 1] after clamping
  bool outside;  // raw coordinate was strictly outside [0, n-1]
};

inline AxisPos locate(double q, int n) {
  AxisPos p;
  p.outside = (q < 0.0) || (q > static_cast<double>(n - 1));
  const double c = std::clamp(q, 0.0, static_cast<double>(n - 1));
  p.cell = std::min(static_cast<int>(c), n - 2);
  p.t = c - static_cast<double>(p.cell);
  return p;
}

// grad may be nullptr; otherwise receives d(value)/d(q[k]) for k < 2.
inline double sample2(const int* dims, const double* data, const double* q, double* grad) {
  const int nx = dims[0];
  const AxisPos px = locate(q[0], nx);
  const AxisPos py = locate(q[1], dims[1]);
  const double* row0 = data + static_cast<std::size_t>(py.cell) * nx + px.cell;
  const double* row1 = row0 + nx;
  const double wx0 = 1.0 - px.t, wx1 = px.t;
  const double wy0 = 1.0 - py.t, wy1 = py.t;
  const double v0 = wx0 * row0[0] + wx1 * row0[1];
  const double v1 = wx0 * row1[0] + wx1 * row1[1];
  if (grad) {
    grad[0] = px.outside ? 0.0 : wy0 * (row0[1] - row0[0]) + wy1 * (row1[1] - row1[0]);
    grad[1] = py.outside ? 0.0 : v1 - v0;
  }
  return wy0 * v0 + wy1 * v1;
}

inline double sample3(const int* dims, const double* data, const double* q, double* grad) {
  const int nx = dims[0], ny = dims[1];
  const AxisPos px = locate(q[0], nx);
  const AxisPos py = locate(q[1], ny);
  const AxisPos pz = locate(q[2], dims[2]);
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = sy * static_cast<std::size_t>(ny);
  const double* c000 = data + px.cell + sy * py.cell + sz * pz.cell;
  const double wx0 = 1.0 - px.t, wx1 = px.t;
  const double wy0 = 1.0 - py.t, wy1 = py.t;
  const double wz0 = 1.0 - pz.t, wz1 = pz.t;
  const double v00 = wx0 * c000[0] + wx1 * c000[1];
  const double v10 = wx0 * c000[sy] + wx1 * c000[sy + 1];
  const double v01 = wx0 * c000[sz] + wx1 * c000[sz + 1];
  const double v11 = wx0 * c000[sz + sy] + wx1 * c000[sz + sy + 1];
  const double v0 = wy0 * v00 + wy1 * v10;
  const double v1 = wy0 * v01 + wy1 * v11;
  if (grad) {
    const double gx00 = c000[1] - c000[0];
    const double gx10 = c000[sy + 1] - c000[sy];
    const double gx01 = c000[sz + 1] - c000[sz];
    const double gx11 = c000[sz + sy + 1] - c000[sz + sy];
    grad[0] = px.outside ? 0.0
                         : wz0 * (wy0 * gx00 + wy1 * gx10) + wz1 * (wy0 * gx01 + wy1 * gx11);
    grad[1] = py.outside ? 0.0 : wz0 * (v10 - v00) + wz1 * (v11 - v01);
    grad[2] = pz.outside ? 0.0 : v1 - v0;
  }
  return wz0 * v0 + wz1 * v1;
}

inline double sample_nd(const int* dims, int ndim, const double* data, const double* q,
                        double* grad) {
  return ndim == 2 ? sample2(dims, data, q, grad) : sample3(dims, data, q, grad);
}

}  // namespace tpseg::detail

#endif  // TPSEG_INTERP_DETAIL_HPP
