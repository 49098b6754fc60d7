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

#ifndef TPSEG_TOPOLOGY_HPP
#define TPSEG_TOPOLOGY_HPP

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "tpseg/deform.hpp"
#include "tpseg/grid.hpp"

namespace tpseg {

/// face = 4-adjacency in 2D / 6 in 3D; full = 8 / 26. Foreground analysis
/// uses face adjacency by default, with full adjacency for the background
/// (the complementary pair).
enum class Connectivity { face, full };

struct ComponentLabels {
  Extents dims;
  std::vector<std::int32_t> labels;  // 0 = background, components numbered from 1
  int count = 0;
};

/// Labels foreground components with consecutive positive integers in
/// deterministic scan order (x fastest). Input must be binary.
ComponentLabels connected_components(const MaskGrid& mask, Connectivity connectivity);

/// Euler characteristic of the cubical complex spanned by the foreground:
/// V - E + F in 2D, V - E + F - C in 3D. Exact integer arithmetic.
long long euler_characteristic(const MaskGrid& mask);

/// Keeps only the largest foreground component under face adjacency; ties are
/// broken by scan order. Holes are preserved unless fill_holes is set. An
/// empty mask is returned unchanged and flagged via *empty_warning.
MaskGrid cca_postprocess(const MaskGrid& mask, bool fill_holes = false,
                         bool* empty_warning = nullptr);

/// The measured certificate that stands in for an assumed guarantee:
/// component count and Euler characteristic of the prediction, fold evidence
/// from the Jacobian grid when one is supplied, and whether the prediction's
/// topology equals the template's.
struct TopologyReport {
  int component_count = 0;
  long long euler_characteristic = 0;
  std::optional<double> min_determinant;
  long long fold_cell_count = 0;  // cells with det <= 0; 0 when no Jacobian given
  bool matches_template = false;
};

TopologyReport certify(const MaskGrid& pred, const MaskGrid& tmpl,
                       const JacobianGrid* jac = nullptr);

void to_json(nlohmann::json& j, const TopologyReport& report);

}  // namespace tpseg

#endif  // TPSEG_TOPOLOGY_HPP
