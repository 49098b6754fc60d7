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

#include "tpseg/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "interp_detail.hpp"

namespace tpseg {

using nlohmann::json;

void validate(const LossConfig& c) {
  if (c.lambda_dice < 0.0 || c.lambda_jac < 0.0 || c.lambda_lap < 0.0)
    throw std::invalid_argument("loss config: weights must be non-negative");
  if (c.epsilon < 0.0) throw std::invalid_argument("loss config: epsilon must be non-negative");
  if (!(c.dice_smoothing > 0.0))
    throw std::invalid_argument("loss config: dice_smoothing must be positive");
}

void to_json(json& j, const LossConfig& c) {
  j = json{{"lambda_dice", c.lambda_dice},
           {"lambda_jac", c.lambda_jac},
           {"lambda_lap", c.lambda_lap},
           {"epsilon", c.epsilon},
           {"dice_smoothing", c.dice_smoothing}};
}

void from_json(const json& j, LossConfig& c) {
  for (auto& [key, _] : j.items())
    if (key != "lambda_dice" && key != "lambda_jac" && key != "lambda_lap" &&
        key != "epsilon" && key != "dice_smoothing")
      throw std::invalid_argument("loss config: unknown field '" + key + "'");
  c = LossConfig{};
  if (j.contains("lambda_dice")) j.at("lambda_dice").get_to(c.lambda_dice);
  if (j.contains("lambda_jac")) j.at("lambda_jac").get_to(c.lambda_jac);
  if (j.contains("lambda_lap")) j.at("lambda_lap").get_to(c.lambda_lap);
  if (j.contains("epsilon")) j.at("epsilon").get_to(c.epsilon);
  if (j.contains("dice_smoothing")) j.at("dice_smoothing").get_to(c.dice_smoothing);
  validate(c);
}

double dice_loss(const MaskGrid& pred, const MaskGrid& label, double smoothing) {
  if (pred.dims != label.dims)
    throw std::invalid_argument("dice_loss: pred and label dims differ");
  if (!(smoothing > 0.0)) throw std::invalid_argument("dice_loss: smoothing must be positive");
  double sum_p = 0.0, sum_g = 0.0, sum_pg = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    sum_p += pred.data[i];
    sum_g += label.data[i];
    sum_pg += pred.data[i] * label.data[i];
  }
  return 1.0 - (2.0 * sum_pg + smoothing) / (sum_p + sum_g + smoothing);
}

double jacobian_loss(const DeformationField& field, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("jacobian_loss: epsilon must be non-negative");
  const JacobianGrid jac = jacobian_determinant(field);
  double acc = 0.0;
  for (double det : jac.data) acc += std::max(0.0, epsilon - det);
  return acc;
}

double laplacian_loss(const DeformationField& field) {
  const LaplacianGrid lap = laplacian(field);
  double acc = 0.0;
  for (double v : lap.data) acc += std::abs(v);
  return acc;
}

// Interior Laplacian value count, the normalizer of the smoothness term in
// the total objective. The Dice term is already image-normalized ([0,1]) and
// the margin term acts as a barrier, so averaging the Laplacian is what keeps
// the fidelity/smoothness balance independent of grid size; with a plain sum
// the smoothness cost of any useful deformation exceeds the largest possible
// Dice gain and the optimum degenerates to the identity map.
static std::size_t laplacian_value_count(const Extents& dims) {
  std::size_t n = dims.size();
  for (int d : dims) n *= static_cast<std::size_t>(d - 2);
  return n;
}

LossBreakdown total_loss(const MaskGrid& pred, const MaskGrid& label,
                         const DeformationField& field, const LossConfig& config) {
  validate(config);
  if (pred.dims != field.dims)
    throw std::invalid_argument("total_loss: pred and field dims differ");
  LossBreakdown b;
  if (config.lambda_dice != 0.0) b.dice = dice_loss(pred, label, config.dice_smoothing);
  if (config.lambda_jac != 0.0) b.jacobian = jacobian_loss(field, config.epsilon);
  if (config.lambda_lap != 0.0)
    b.laplacian = laplacian_loss(field) /
                  static_cast<double>(laplacian_value_count(field.dims));
  b.total = config.lambda_dice * b.dice + config.lambda_jac * b.jacobian +
            config.lambda_lap * b.laplacian;
  return b;
}

namespace {

// d(dice)/d(pred value at node i) is (N - 2*g_i*D) / D^2 with
// N = 2*sum(p*g) + s and D = sum(p) + sum(g) + s; chain through the sampling
// gradient of the template at f(i).
void accumulate_dice_gradient(const MaskGrid& tmpl, const MaskGrid& label,
                              const DeformationField& field, double smoothing, double weight,
                              std::vector<double>& grad) {
  const int ndim = field.ndim();
  const std::size_t n = num_nodes(field.dims);
  std::vector<double> pred(n);
  std::vector<double> dpdq(n * ndim);

  double sum_p = 0.0, sum_g = 0.0, sum_pg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* q = field.data.data() + i * ndim;
    for (int c = 0; c < ndim; ++c)
      if (!std::isfinite(q[c]))
        throw std::runtime_error("loss gradient: non-finite coordinate in deformation field");
    const double p = detail::sample_nd(tmpl.dims.data(), ndim, tmpl.data.data(), q,
                                       dpdq.data() + i * ndim);
    pred[i] = p;
    sum_p += p;
    sum_g += label.data[i];
    sum_pg += p * label.data[i];
  }
  const double num = 2.0 * sum_pg + smoothing;
  const double den = sum_p + sum_g + smoothing;
  const double inv_den2 = 1.0 / (den * den);
  for (std::size_t i = 0; i < n; ++i) {
    const double coef = weight * (num - 2.0 * label.data[i] * den) * inv_den2;
    for (int c = 0; c < ndim; ++c) grad[i * ndim + c] += coef * dpdq[i * ndim + c];
  }
}

// Active cells (det < epsilon) contribute -cof[i][k] to f_i at the forward
// neighbor along axis k and +sum_k cof[i][k] at the base node.
void accumulate_jacobian_gradient(const DeformationField& field, double epsilon, double weight,
                                  std::vector<double>& grad) {
  const int ndim = field.ndim();
  const int nx = field.dims[0];
  const int ny = field.dims[1];
  const std::size_t sx = static_cast<std::size_t>(ndim);
  const std::size_t sy = sx * static_cast<std::size_t>(nx);
  const std::size_t sz = sy * static_cast<std::size_t>(ny);
  const double* f = field.data.data();

  if (ndim == 2) {
    for (int y = 0; y < ny - 1; ++y)
      for (int x = 0; x < nx - 1; ++x) {
        const std::size_t base = sy * y + sx * x;
        const double* p = f + base;
        const double a0 = p[sx] - p[0], a1 = p[sx + 1] - p[1];
        const double b0 = p[sy] - p[0], b1 = p[sy + 1] - p[1];
        const double det = a0 * b1 - b0 * a1;
        if (det >= epsilon) continue;
        // cof[i][k] = d(det)/dA[i][k] for A = [a | b]
        const double c00 = b1, c10 = -b0;
        const double c01 = -a1, c11 = a0;
        grad[base + sx + 0] += weight * -c00;
        grad[base + sx + 1] += weight * -c10;
        grad[base + sy + 0] += weight * -c01;
        grad[base + sy + 1] += weight * -c11;
        grad[base + 0] += weight * (c00 + c01);
        grad[base + 1] += weight * (c10 + c11);
      }
    return;
  }

  const int nz = field.dims[2];
  for (int z = 0; z < nz - 1; ++z)
    for (int y = 0; y < ny - 1; ++y)
      for (int x = 0; x < nx - 1; ++x) {
        const std::size_t base = sz * z + sy * y + sx * x;
        const double* p = f + base;
        const double a0 = p[sx] - p[0], a1 = p[sx + 1] - p[1], a2 = p[sx + 2] - p[2];
        const double b0 = p[sy] - p[0], b1 = p[sy + 1] - p[1], b2 = p[sy + 2] - p[2];
        const double c0 = p[sz] - p[0], c1 = p[sz + 1] - p[1], c2 = p[sz + 2] - p[2];
        const double det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) +
                           a2 * (b0 * c1 - b1 * c0);
        if (det >= epsilon) continue;
        const double m00 = b1 * c2 - c1 * b2;
        const double m10 = -(b0 * c2 - c0 * b2);
        const double m20 = b0 * c1 - c0 * b1;
        const double m01 = -(a1 * c2 - c1 * a2);
        const double m11 = a0 * c2 - c0 * a2;
        const double m21 = -(a0 * c1 - c0 * a1);
        const double m02 = a1 * b2 - b1 * a2;
        const double m12 = -(a0 * b2 - b0 * a2);
        const double m22 = a0 * b1 - b0 * a1;
        grad[base + sx + 0] += weight * -m00;
        grad[base + sx + 1] += weight * -m10;
        grad[base + sx + 2] += weight * -m20;
        grad[base + sy + 0] += weight * -m01;
        grad[base + sy + 1] += weight * -m11;
        grad[base + sy + 2] += weight * -m21;
        grad[base + sz + 0] += weight * -m02;
        grad[base + sz + 1] += weight * -m12;
        grad[base + sz + 2] += weight * -m22;
        grad[base + 0] += weight * (m00 + m01 + m02);
        grad[base + 1] += weight * (m10 + m11 + m12);
        grad[base + 2] += weight * (m20 + m21 + m22);
      }
}

// Adjoint of the central-difference stencil: each interior value pushes
// sign(lap) onto its axis neighbors and -2*D*sign(lap) onto the center.
void accumulate_laplacian_gradient(const DeformationField& field, double weight,
                                   std::vector<double>& grad) {
  const int ndim = field.ndim();
  const int nx = field.dims[0];
  const int ny = field.dims[1];
  const int nz = ndim == 3 ? field.dims[2] : 1;
  const std::ptrdiff_t sx = ndim;
  const std::ptrdiff_t sy = sx * nx;
  const std::ptrdiff_t sz = sy * ny;
  const double* f = field.data.data();
  const double center_coeff = -2.0 * ndim;

  const int z_lo = ndim == 3 ? 1 : 0;
  const int z_hi = ndim == 3 ? nz - 1 : 1;
  for (int z = z_lo; z < z_hi; ++z)
    for (int y = 1; y < ny - 1; ++y)
      for (int x = 1; x < nx - 1; ++x) {
        const std::ptrdiff_t base = sz * z + sy * y + sx * x;
        const double* p = f + base;
        for (int c = 0; c < ndim; ++c) {
          double lap = p[sx + c] + p[c - sx] + p[sy + c] + p[c - sy];
          if (ndim == 3) lap += p[sz + c] + p[c - sz];
          lap += center_coeff * p[c];
          if (lap == 0.0) continue;
          const double s = weight * (lap > 0.0 ? 1.0 : -1.0);
          grad[base + sx + c] += s;
          grad[base - sx + c] += s;
          grad[base + sy + c] += s;
          grad[base - sy + c] += s;
          if (ndim == 3) {
            grad[base + sz + c] += s;
            grad[base - sz + c] += s;
          }
          grad[base + c] += center_coeff * s;
        }
      }
}

}  // namespace

std::vector<double> total_loss_gradient(const MaskGrid& tmpl, const MaskGrid& label,
                                        const DeformationField& field,
                                        const LossConfig& config) {
  validate(config);
  if (tmpl.dims != field.dims)
    throw std::invalid_argument("total_loss_gradient: template and field dims differ");
  if (label.dims != field.dims)
    throw std::invalid_argument("total_loss_gradient: label and field dims differ");

  std::vector<double> grad(field.data.size(), 0.0);
  if (config.lambda_dice != 0.0)
    accumulate_dice_gradient(tmpl, label, field, config.dice_smoothing, config.lambda_dice,
                             grad);
  if (config.lambda_jac != 0.0)
    accumulate_jacobian_gradient(field, config.epsilon, config.lambda_jac, grad);
  if (config.lambda_lap != 0.0)
    accumulate_laplacian_gradient(
        field,
        config.lambda_lap / static_cast<double>(laplacian_value_count(field.dims)), grad);
  return grad;
}

}  // namespace tpseg
