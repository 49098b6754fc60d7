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

#include "tpseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "interp_detail.hpp"

namespace tpseg {

namespace {

std::vector<double> default_spacing(const Extents& dims) {
  return std::vector<double>(dims.size(), 1.0);
}

void check_point(std::span<const double> point, int ndim, const char* who) {
  if (static_cast<int>(point.size()) != ndim)
    throw std::invalid_argument(std::string(who) + ": point has wrong number of coordinates");
  for (double c : point)
    if (!std::isfinite(c))
      throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
}

struct AxisTable {
  std::vector<int> cell;
  std::vector<double> t;
};

// Source position for fine node X is X/factor. The cell index is clamped to
// the last coarse cell; when clamp_t is false the offset may exceed 1 there,
// which linearly extrapolates.
AxisTable make_upsample_table(int coarse_n, int factor, bool clamp_t) {
  AxisTable tab;
  const int fine_n = coarse_n * factor;
  tab.cell.resize(fine_n);
  tab.t.resize(fine_n);
  for (int x = 0; x < fine_n; ++x) {
    int c = x / factor;
    int r = x % factor;
    if (c > coarse_n - 2) {
      r += (c - (coarse_n - 2)) * factor;
      c = coarse_n - 2;
    }
    double t = static_cast<double>(r) / static_cast<double>(factor);
    if (clamp_t) t = std::min(t, 1.0);
    tab.cell[x] = c;
    tab.t[x] = t;
  }
  return tab;
}

// Shared lattice kernels on (dims, data); 2D grids use nz = 1.
void dims3(const Extents& dims, int& nx, int& ny, int& nz) {
  nx = dims[0];
  ny = dims[1];
  nz = dims.size() == 3 ? dims[2] : 1;
}

std::vector<double> downsample_data(const Extents& dims, const std::vector<double>& data,
                                    int factor, Extents& out_dims, bool* padded) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  bool pad = false;
  out_dims = dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    out_dims[k] = (dims[k] + factor - 1) / factor;
    if (dims[k] % factor != 0) pad = true;
  }
  if (padded) *padded = pad;
  if (factor == 1) return data;

  int nx, ny, nz;
  dims3(dims, nx, ny, nz);
  int ox, oy, oz;
  dims3(out_dims, ox, oy, oz);
  const bool is3d = dims.size() == 3;
  const double inv = 1.0 / std::pow(static_cast<double>(factor),
                                    static_cast<double>(dims.size()));
  std::vector<double> out(num_nodes(out_dims));
  std::size_t w = 0;
  for (int z = 0; z < oz; ++z)
    for (int y = 0; y < oy; ++y)
      for (int x = 0; x < ox; ++x) {
        double sum = 0.0;
        const int bz = is3d ? z * factor : 0;
        const int zcount = is3d ? factor : 1;
        for (int dz = 0; dz < zcount; ++dz) {
          const int sz_ = std::min(bz + dz, nz - 1);
          for (int dy = 0; dy < factor; ++dy) {
            const int sy = std::min(y * factor + dy, ny - 1);
            const std::size_t row =
                static_cast<std::size_t>(nx) * (sy + static_cast<std::size_t>(ny) * sz_);
            for (int dx = 0; dx < factor; ++dx)
              sum += data[row + std::min(x * factor + dx, nx - 1)];
          }
        }
        out[w++] = sum * inv;
      }
  return out;
}

std::vector<double> upsample_data(const Extents& dims, const std::vector<double>& data,
                                  int factor, bool clamp_t, Extents& out_dims) {
  if (factor < 1) throw std::invalid_argument("upsample: factor must be >= 1");
  out_dims = dims;
  for (auto& d : out_dims) d *= factor;
  if (factor == 1) return data;

  int nx, ny, nz;
  dims3(dims, nx, ny, nz);
  const bool is3d = dims.size() == 3;
  const AxisTable tx = make_upsample_table(nx, factor, clamp_t);
  const AxisTable ty = make_upsample_table(ny, factor, clamp_t);
  const AxisTable tz =
      is3d ? make_upsample_table(nz, factor, clamp_t) : AxisTable{{0}, {0.0}};

  std::vector<double> out(num_nodes(out_dims));
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = sy * static_cast<std::size_t>(ny);
  std::size_t w = 0;
  const int fz = is3d ? nz * factor : 1;
  for (int z = 0; z < fz; ++z) {
    const int cz = tz.cell[z];
    const double wz1 = tz.t[z], wz0 = 1.0 - wz1;
    for (int y = 0; y < ny * factor; ++y) {
      const int cy = ty.cell[y];
      const double wy1 = ty.t[y], wy0 = 1.0 - wy1;
      for (int x = 0; x < nx * factor; ++x) {
        const int cx = tx.cell[x];
        const double wx1 = tx.t[x], wx0 = 1.0 - wx1;
        const double* base = data.data() + cx + sy * cy + sz * cz;
        const double v00 = wx0 * base[0] + wx1 * base[1];
        const double v10 = wx0 * base[sy] + wx1 * base[sy + 1];
        double v = wy0 * v00 + wy1 * v10;
        if (is3d) {
          const double v01 = wx0 * base[sz] + wx1 * base[sz + 1];
          const double v11 = wx0 * base[sz + sy] + wx1 * base[sz + sy + 1];
          v = wz0 * v + wz1 * (wy0 * v01 + wy1 * v11);
        }
        out[w++] = v;
      }
    }
  }
  return out;
}

}  // namespace

std::size_t num_nodes(const Extents& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

void validate_dims(const Extents& dims) {
  if (dims.size() != 2 && dims.size() != 3)
    throw std::invalid_argument("grid: dimension count must be 2 or 3");
  for (int d : dims)
    if (d < 2) throw std::invalid_argument("grid: every extent must be >= 2");
}

ScalarGrid make_scalar_grid(const Extents& dims, double fill) {
  validate_dims(dims);
  return ScalarGrid{dims, default_spacing(dims), std::vector<double>(num_nodes(dims), fill)};
}

MaskGrid make_mask_grid(const Extents& dims, double fill, double threshold) {
  validate_dims(dims);
  if (fill < 0.0 || fill > 1.0) throw std::invalid_argument("mask: fill outside [0,1]");
  if (threshold <= 0.0 || threshold >= 1.0)
    throw std::invalid_argument("mask: threshold outside (0,1)");
  return MaskGrid{dims, default_spacing(dims), std::vector<double>(num_nodes(dims), fill),
                  threshold};
}

DeformationField make_identity_field(const Extents& dims) {
  validate_dims(dims);
  const int ndim = static_cast<int>(dims.size());
  DeformationField f{dims, default_spacing(dims),
                     std::vector<double>(num_nodes(dims) * ndim)};
  int nx, ny, nz;
  dims3(dims, nx, ny, nz);
  std::size_t w = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        f.data[w++] = static_cast<double>(x);
        f.data[w++] = static_cast<double>(y);
        if (ndim == 3) f.data[w++] = static_cast<double>(z);
      }
  return f;
}

double sample_linear(const ScalarGrid& grid, std::span<const double> point) {
  check_point(point, grid.ndim(), "sample_linear");
  return detail::sample_nd(grid.dims.data(), grid.ndim(), grid.data.data(), point.data(),
                           nullptr);
}

double sample_linear(const MaskGrid& grid, std::span<const double> point) {
  check_point(point, grid.ndim(), "sample_linear");
  return detail::sample_nd(grid.dims.data(), grid.ndim(), grid.data.data(), point.data(),
                           nullptr);
}

ScalarGrid downsample(const ScalarGrid& grid, int factor, bool* padded) {
  ScalarGrid out;
  out.data = downsample_data(grid.dims, grid.data, factor, out.dims, padded);
  out.spacing = grid.spacing;
  for (auto& s : out.spacing) s *= factor;
  return out;
}

MaskGrid downsample(const MaskGrid& grid, int factor, bool* padded) {
  MaskGrid out;
  out.data = downsample_data(grid.dims, grid.data, factor, out.dims, padded);
  out.spacing = grid.spacing;
  for (auto& s : out.spacing) s *= factor;
  out.threshold = grid.threshold;
  return out;
}

ScalarGrid upsample(const ScalarGrid& grid, int factor) {
  ScalarGrid out;
  out.data = upsample_data(grid.dims, grid.data, factor, /*clamp_t=*/true, out.dims);
  out.spacing = grid.spacing;
  for (auto& s : out.spacing) s /= factor;
  return out;
}

MaskGrid upsample(const MaskGrid& grid, int factor) {
  MaskGrid out;
  out.data = upsample_data(grid.dims, grid.data, factor, /*clamp_t=*/true, out.dims);
  for (auto& v : out.data) v = std::clamp(v, 0.0, 1.0);
  out.spacing = grid.spacing;
  for (auto& s : out.spacing) s /= factor;
  out.threshold = grid.threshold;
  return out;
}

DeformationField upsample_field(const DeformationField& field, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample_field: factor must be >= 1");
  const int ndim = field.ndim();
  if (factor == 1) return field;

  DeformationField out;
  out.dims = field.dims;
  for (auto& d : out.dims) d *= factor;
  out.spacing = field.spacing;
  for (auto& s : out.spacing) s /= factor;
  out.data.resize(num_nodes(out.dims) * ndim);

  const std::size_t n = num_nodes(field.dims);
  std::vector<double> channel(n);
  const double scale = static_cast<double>(factor);
  for (int c = 0; c < ndim; ++c) {
    for (std::size_t i = 0; i < n; ++i) channel[i] = field.data[i * ndim + c];
    Extents fine_dims;
    std::vector<double> fine =
        upsample_data(field.dims, channel, factor, /*clamp_t=*/false, fine_dims);
    for (std::size_t i = 0; i < fine.size(); ++i) out.data[i * ndim + c] = fine[i] * scale;
  }
  return out;
}

MaskGrid binarize(const MaskGrid& mask) {
  MaskGrid out = mask;
  for (auto& v : out.data) v = v >= mask.threshold ? 1.0 : 0.0;
  return out;
}

bool is_binary(const MaskGrid& mask) {
  return std::all_of(mask.data.begin(), mask.data.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

ScalarGrid normalize_intensity(const ScalarGrid& image) {
  ScalarGrid out = image;
  const auto [lo_it, hi_it] = std::minmax_element(image.data.begin(), image.data.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (auto& v : out.data) v = (v - lo) * inv;
  return out;
}

}  // namespace tpseg
