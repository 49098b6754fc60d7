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

#ifndef TPSEG_SOLVER_HPP
#define TPSEG_SOLVER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpseg/loss.hpp"
#include "tpseg/topology.hpp"

namespace tpseg {

enum class Optimizer { gradient_descent, adaptive_moment };

/// Per-solve settings. The adaptive-moment optimizer uses decay constants
/// 0.9/0.999 with numerical floor 1e-8. Initialization is the deterministic
/// identity field; seed is reserved for randomized variants and recorded in
/// run manifests.
struct SolveConfig {
  LossConfig loss;
  int max_iters = 500;
  double step_size = 0.05;
  Optimizer optimizer = Optimizer::adaptive_moment;
  double convergence_tol = 1e-6;
  std::int64_t seed = 0;
};

void validate(const SolveConfig& config);
void to_json(nlohmann::json& j, const SolveConfig& config);
void from_json(const nlohmann::json& j, SolveConfig& config);

struct SolveResult {
  DeformationField field;
  MaskGrid soft_mask;  // warped template before binarization
  MaskGrid mask;       // binarize(soft_mask)
  std::vector<LossBreakdown> loss_history;
  TopologyReport topology;
};

/// Optimizes the deformation field for one image/template/target triple,
/// starting from the identity. Stops at max_iters, when the total loss
/// reaches exactly zero, or when its relative change drops below
/// convergence_tol. Throws on non-finite loss (step size too large).
SolveResult solve_single_level(const ScalarGrid& image, const MaskGrid& tmpl,
                               const MaskGrid& target, const SolveConfig& config);

/// Coarse-to-fine driver. Level k of n solves at 1/2^(n-k) resolution; the
/// coarsest level uses the downsampled user template, later levels use the
/// upsampled soft mask predicted by the previous level. The field restarts
/// from the identity at each level; the mask carries the information across.
/// levels == 1 is bit-identical to solve_single_level.
SolveResult solve_multilevel(const ScalarGrid& image, const MaskGrid& tmpl,
                             const MaskGrid& target, int levels, const SolveConfig& config);

enum class TargetMethod { otsu_threshold, provided };

/// Fidelity target for solves without a ground-truth mask: Otsu thresholding
/// of the (normalized) image, or a passthrough of an externally supplied
/// mask. Otsu rejects constant-intensity images.
MaskGrid derive_target_mask(const ScalarGrid& image, TargetMethod method,
                            const MaskGrid* provided = nullptr);

/// CSV rendering of a loss history, header "iter,dice,jacobian,laplacian,total".
std::string loss_history_csv(const std::vector<LossBreakdown>& history);

}  // namespace tpseg

#endif  // TPSEG_SOLVER_HPP
