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

#ifndef TPSEG_GRID_HPP
#define TPSEG_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace tpseg {

/// Extent per axis, x first. Two or three axes, every extent >= 2.
using Extents = std::vector<int>;

std::size_t num_nodes(const Extents& dims);

/// Throws std::invalid_argument unless dims has 2 or 3 axes, all >= 2.
void validate_dims(const Extents& dims);

/// Dense scalar image. Node (x,y[,z]) lives at data[x + dims[0]*(y + dims[1]*z)],
/// x fastest. Spacing is physical metadata only; all finite differences and
/// interpolation work in index units.
struct ScalarGrid {
  Extents dims;
  std::vector<double> spacing;
  std::vector<double> data;

  int ndim() const { return static_cast<int>(dims.size()); }
  std::size_t index(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
  double at(int x, int y, int z = 0) const { return data[index(x, y, z)]; }
};

/// Soft mask with values in [0,1] and a binarization threshold in (0,1).
/// Layout identical to ScalarGrid.
struct MaskGrid {
  Extents dims;
  std::vector<double> spacing;
  std::vector<double> data;
  double threshold = 0.5;

  int ndim() const { return static_cast<int>(dims.size()); }
  std::size_t index(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
  double at(int x, int y, int z = 0) const { return data[index(x, y, z)]; }
};

/// Coordinate-valued map on the node lattice. Node-major storage: the D
/// coordinate components of node 0, then node 1, ... Coordinates are absolute
/// positions in index units, not displacements; the identity field stores the
/// node's own index in every component.
struct DeformationField {
  Extents dims;
  std::vector<double> spacing;
  std::vector<double> data;

  int ndim() const { return static_cast<int>(dims.size()); }
  int channels() const { return static_cast<int>(dims.size()); }
  std::size_t node(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
  double coord(std::size_t node_index, int channel) const {
    return data[node_index * dims.size() + channel];
  }
};

ScalarGrid make_scalar_grid(const Extents& dims, double fill = 0.0);
MaskGrid make_mask_grid(const Extents& dims, double fill = 0.0, double threshold = 0.5);
DeformationField make_identity_field(const Extents& dims);

/// Bilinear / trilinear lookup with coordinates clamped to the grid domain.
/// Queries at exact node positions return the stored value; non-finite
/// coordinates throw.
double sample_linear(const ScalarGrid& grid, std::span<const double> point);
double sample_linear(const MaskGrid& grid, std::span<const double> point);

/// Block average over factor^D blocks. Extents not divisible by the factor
/// are padded by edge replication first; *padded reports whether that happened.
ScalarGrid downsample(const ScalarGrid& grid, int factor, bool* padded = nullptr);
MaskGrid downsample(const MaskGrid& grid, int factor, bool* padded = nullptr);

/// Linear interpolation onto the lattice with extents multiplied by factor.
/// Fine node X reads the coarse grid at X/factor (clamped).
ScalarGrid upsample(const ScalarGrid& grid, int factor);
MaskGrid upsample(const MaskGrid& grid, int factor);

/// Field transfer to a finer lattice: per-channel linear interpolation at
/// X/factor (linearly extrapolated past the last coarse node) followed by a
/// multiplication of the coordinate values by factor. Maps the identity field
/// to the identity field of the fine lattice and preserves affine fields.
DeformationField upsample_field(const DeformationField& field, int factor);

/// Hard 0/1 mask: value >= threshold becomes 1. Idempotent.
MaskGrid binarize(const MaskGrid& mask);

bool is_binary(const MaskGrid& mask);

/// Affine rescale of intensities onto [0,1]; a constant image maps to all
/// zeros.
ScalarGrid normalize_intensity(const ScalarGrid& image);

}  // namespace tpseg

#endif  // TPSEG_GRID_HPP
