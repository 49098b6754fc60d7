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

#include "tpseg/deform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "interp_detail.hpp"

namespace tpseg {

JacobianGrid jacobian_determinant(const DeformationField& field) {
  validate_dims(field.dims);
  const int ndim = field.ndim();
  JacobianGrid jac;
  jac.dims = field.dims;
  for (auto& d : jac.dims) d -= 1;

  const int nx = field.dims[0];
  const int ny = field.dims[1];
  const std::size_t sx = static_cast<std::size_t>(ndim);            // node stride along x
  const std::size_t sy = sx * static_cast<std::size_t>(nx);         // along y
  const std::size_t sz = sy * static_cast<std::size_t>(ny);         // along z
  const double* f = field.data.data();

  if (ndim == 2) {
    jac.data.resize(static_cast<std::size_t>(jac.dims[0]) * jac.dims[1]);
    std::size_t w = 0;
    for (int y = 0; y < ny - 1; ++y)
      for (int x = 0; x < nx - 1; ++x) {
        const double* p = f + sy * y + sx * x;
        const double ax = p[sx] - p[0], ay = p[sx + 1] - p[1];      // column x
        const double bx = p[sy] - p[0], by = p[sy + 1] - p[1];      // column y
        jac.data[w++] = ax * by - bx * ay;
      }
    return jac;
  }

  const int nz = field.dims[2];
  jac.data.resize(static_cast<std::size_t>(jac.dims[0]) * jac.dims[1] * jac.dims[2]);
  std::size_t w = 0;
  for (int z = 0; z < nz - 1; ++z)
    for (int y = 0; y < ny - 1; ++y)
      for (int x = 0; x < nx - 1; ++x) {
        const double* p = f + sz * z + sy * y + sx * x;
        const double a0 = p[sx] - p[0], a1 = p[sx + 1] - p[1], a2 = p[sx + 2] - p[2];
        const double b0 = p[sy] - p[0], b1 = p[sy + 1] - p[1], b2 = p[sy + 2] - p[2];
        const double c0 = p[sz] - p[0], c1 = p[sz + 1] - p[1], c2 = p[sz + 2] - p[2];
        jac.data[w++] = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) +
                        a2 * (b0 * c1 - b1 * c0);
      }
  return jac;
}

LaplacianGrid laplacian(const DeformationField& field) {
  validate_dims(field.dims);
  for (int d : field.dims)
    if (d < 3) throw std::invalid_argument("laplacian: every extent must be >= 3");
  const int ndim = field.ndim();

  LaplacianGrid lap;
  lap.dims = field.dims;
  for (auto& d : lap.dims) d -= 2;
  lap.channels = ndim;
  lap.data.resize(num_nodes(lap.dims) * static_cast<std::size_t>(ndim));

  const int nx = field.dims[0];
  const int ny = field.dims[1];
  const int nz = ndim == 3 ? field.dims[2] : 1;
  const std::ptrdiff_t sx = ndim;
  const std::ptrdiff_t sy = sx * nx;
  const std::ptrdiff_t sz = sy * ny;
  const double center_coeff = -2.0 * ndim;
  const double* f = field.data.data();

  std::size_t w = 0;
  const int z_lo = ndim == 3 ? 1 : 0;
  const int z_hi = ndim == 3 ? nz - 1 : 1;
  for (int z = z_lo; z < z_hi; ++z)
    for (int y = 1; y < ny - 1; ++y)
      for (int x = 1; x < nx - 1; ++x) {
        const double* p = f + sz * z + sy * y + sx * x;
        for (int c = 0; c < ndim; ++c) {
          double acc = p[sx + c] + p[c - sx] + p[sy + c] + p[c - sy];
          if (ndim == 3) acc += p[sz + c] + p[c - sz];
          lap.data[w++] = acc + center_coeff * p[c];
        }
      }
  return lap;
}

MaskGrid warp_mask(const MaskGrid& tmpl, const DeformationField& field) {
  if (tmpl.dims != field.dims)
    throw std::invalid_argument("warp_mask: template and field dims differ");
  const int ndim = field.ndim();
  MaskGrid out = tmpl;
  const std::size_t n = num_nodes(field.dims);
  for (std::size_t i = 0; i < n; ++i) {
    const double* q = field.data.data() + i * ndim;
    for (int c = 0; c < ndim; ++c)
      if (!std::isfinite(q[c]))
        throw std::runtime_error("warp_mask: non-finite coordinate in deformation field");
    const double v =
        detail::sample_nd(tmpl.dims.data(), ndim, tmpl.data.data(), q, nullptr);
    out.data[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

double min_determinant(const JacobianGrid& jac) {
  return *std::min_element(jac.data.begin(), jac.data.end());
}

ScalarGrid to_scalar_grid(const JacobianGrid& jac) {
  return ScalarGrid{jac.dims, std::vector<double>(jac.dims.size(), 1.0), jac.data};
}

}  // namespace tpseg
