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

#ifndef TPSEG_LOSS_HPP
#define TPSEG_LOSS_HPP

#include <json.hpp>

#include "tpseg/deform.hpp"
#include "tpseg/grid.hpp"

namespace tpseg {

/// Weights of the three loss terms, the Jacobian margin, and the Dice
/// smoothing constant.
struct LossConfig {
  double lambda_dice = 1.0;
  double lambda_jac = 1.0;
  double lambda_lap = 0.1;
  double epsilon = 0.1;
  double dice_smoothing = 1.0;
};

void validate(const LossConfig& config);

// JSON round trip with exactly the five field names above; unknown keys are
// rejected, missing keys keep their defaults.
void to_json(nlohmann::json& j, const LossConfig& config);
void from_json(const nlohmann::json& j, LossConfig& config);

/// Unweighted term values plus the weighted total
/// (total = lambda_dice*dice + lambda_jac*jacobian + lambda_lap*laplacian).
/// Terms whose weight is zero are skipped and reported as 0. The laplacian
/// entry is averaged over interior values, so the fidelity/smoothness balance
/// does not depend on grid size; dice is image-normalized by construction and
/// jacobian keeps its plain sum, acting as a margin barrier.
struct LossBreakdown {
  double dice = 0.0;
  double jacobian = 0.0;
  double laplacian = 0.0;
  double total = 0.0;
};

/// Smoothed soft Dice: 1 - (2*sum(p*g) + s) / (sum(p) + sum(g) + s).
/// Exactly 0 for identical binary masks.
double dice_loss(const MaskGrid& pred, const MaskGrid& label, double smoothing = 1.0);

/// Sum over cells of max(0, epsilon - det). Zero iff every cell determinant
/// is at least epsilon.
double jacobian_loss(const DeformationField& field, double epsilon);

/// L1 norm of the per-channel interior Laplacian.
double laplacian_loss(const DeformationField& field);

/// pred must be warp_mask(template, field) produced by the caller.
LossBreakdown total_loss(const MaskGrid& pred, const MaskGrid& label,
                         const DeformationField& field, const LossConfig& config);

/// Analytic gradient of the weighted total with respect to every coordinate
/// value of the field, laid out exactly like field.data. The Dice term chains
/// through the multilinear warp lookup, the Jacobian term uses the cofactor
/// rule for d(det)/d(entries), and the Laplacian term applies the adjoint
/// stencil. Subgradient 0 is used at exact kinks of ReLU and |.|.
std::vector<double> total_loss_gradient(const MaskGrid& tmpl, const MaskGrid& label,
                                        const DeformationField& field,
                                        const LossConfig& config);

}  // namespace tpseg

#endif  // TPSEG_LOSS_HPP
