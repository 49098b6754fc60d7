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

#ifndef TPSEG_DEFORM_HPP
#define TPSEG_DEFORM_HPP

#include "tpseg/grid.hpp"

namespace tpseg {

/// Determinant of the forward-difference Jacobian, one value per lattice cell.
/// Cell extents are the field extents minus one, so no boundary extrapolation
/// is involved; the identity field gives exactly 1 everywhere.
struct JacobianGrid {
  Extents dims;  // field dims - 1 per axis
  std::vector<double> data;

  std::size_t index(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
};

/// Central-difference Laplacian per channel, defined on interior nodes only
/// (extents minus two per axis). Node-major, channel fastest.
struct LaplacianGrid {
  Extents dims;  // field dims - 2 per axis
  int channels = 0;
  std::vector<double> data;
};

/// At the cell with base node x, column k of the Jacobian is f(x+e_k) - f(x).
/// 3D determinants expand by cofactors of the first column in a fixed order.
JacobianGrid jacobian_determinant(const DeformationField& field);

/// Requires every extent >= 3. The stencil is the sum of the 2D axis
/// neighbors minus 2D times the center, per channel.
LaplacianGrid laplacian(const DeformationField& field);

/// Backward warp: output value at node x is the template sampled at f(x).
/// The result is a soft mask; binarize separately.
MaskGrid warp_mask(const MaskGrid& tmpl, const DeformationField& field);

/// Minimum over all cells. Positive certifies orientation-preserving local
/// bijectivity on the cell lattice.
double min_determinant(const JacobianGrid& jac);

/// View for export; the raw/sidecar convention stores Jacobian grids with
/// kind "scalar".
ScalarGrid to_scalar_grid(const JacobianGrid& jac);

}  // namespace tpseg

#endif  // TPSEG_DEFORM_HPP
