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

#include "tpseg/solver.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tpseg {

using nlohmann::json;

void validate(const SolveConfig& c) {
  validate(c.loss);
  if (c.max_iters < 1) throw std::invalid_argument("solve config: max_iters must be >= 1");
  if (!(c.step_size > 0.0))
    throw std::invalid_argument("solve config: step_size must be positive");
  if (c.convergence_tol < 0.0)
    throw std::invalid_argument("solve config: convergence_tol must be non-negative");
}

void to_json(json& j, const SolveConfig& c) {
  j = json{{"loss", c.loss},
           {"max_iters", c.max_iters},
           {"step_size", c.step_size},
           {"optimizer", c.optimizer == Optimizer::adaptive_moment ? "adaptive-moment"
                                                                   : "gradient-descent"},
           {"convergence_tol", c.convergence_tol},
           {"seed", c.seed}};
}

void from_json(const json& j, SolveConfig& c) {
  for (auto& [key, _] : j.items())
    if (key != "loss" && key != "max_iters" && key != "step_size" && key != "optimizer" &&
        key != "convergence_tol" && key != "seed")
      throw std::invalid_argument("solve config: unknown field '" + key + "'");
  c = SolveConfig{};
  if (j.contains("loss")) j.at("loss").get_to(c.loss);
  if (j.contains("max_iters")) j.at("max_iters").get_to(c.max_iters);
  if (j.contains("step_size")) j.at("step_size").get_to(c.step_size);
  if (j.contains("optimizer")) {
    const std::string name = j.at("optimizer").get<std::string>();
    if (name == "gradient-descent")
      c.optimizer = Optimizer::gradient_descent;
    else if (name == "adaptive-moment")
      c.optimizer = Optimizer::adaptive_moment;
    else
      throw std::invalid_argument("solve config: unknown optimizer '" + name + "'");
  }
  if (j.contains("convergence_tol")) j.at("convergence_tol").get_to(c.convergence_tol);
  if (j.contains("seed")) j.at("seed").get_to(c.seed);
  validate(c);
}

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamFloor = 1e-8;

// Fluid-like preconditioning: the raw loss gradient of a binary template has
// support only in the one-cell band where the warp lookup crosses the mask
// edge, so plain per-coordinate steps shear that band away from its
// neighborhood and stall. The gradient field is smoothed before the optimizer
// (widening the pull) and the resulting update is smoothed again (coherent
// motion of the front with its neighborhood). The objective and its reported
// gradient are untouched.
constexpr double kGradientSmoothingSigma = 2.0;
constexpr int kGradientSmoothingRadius = 5;

// Separable truncated-Gaussian smoothing of a node-major, channel-fastest
// vector field; weights are renormalized near borders.
void smooth_vector_field(const Extents& dims, int channels, std::vector<double>& data) {
  std::array<double, 2 * kGradientSmoothingRadius + 1> kernel;
  for (int j = -kGradientSmoothingRadius; j <= kGradientSmoothingRadius; ++j)
    kernel[static_cast<std::size_t>(j + kGradientSmoothingRadius)] =
        std::exp(-0.5 * j * j / (kGradientSmoothingSigma * kGradientSmoothingSigma));

  const int ndim = static_cast<int>(dims.size());
  const int nx = dims[0], ny = dims[1];
  const int nz = ndim == 3 ? dims[2] : 1;
  const std::ptrdiff_t stride[3] = {channels, static_cast<std::ptrdiff_t>(channels) * nx,
                                    static_cast<std::ptrdiff_t>(channels) * nx * ny};
  const int extent[3] = {nx, ny, nz};
  std::vector<double> tmp(data.size());

  for (int axis = 0; axis < ndim; ++axis) {
    const std::ptrdiff_t s = stride[axis];
    const int n = extent[axis];
    std::size_t idx = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          const int pos = axis == 0 ? x : axis == 1 ? y : z;
          for (int c = 0; c < channels; ++c, ++idx) {
            double acc = 0.0, wsum = 0.0;
            const int lo = std::max(-kGradientSmoothingRadius, -pos);
            const int hi = std::min(kGradientSmoothingRadius, n - 1 - pos);
            const double* center = data.data() + idx;
            for (int j = lo; j <= hi; ++j) {
              const double w = kernel[static_cast<std::size_t>(j + kGradientSmoothingRadius)];
              acc += w * center[j * s];
              wsum += w;
            }
            tmp[idx] = acc / wsum;
          }
        }
    data.swap(tmp);
  }
}

template <typename Grid>
Grid pad_to_multiple(const Grid& g, int multiple) {
  Extents target = g.dims;
  bool needs = false;
  for (auto& d : target) {
    const int padded = (d + multiple - 1) / multiple * multiple;
    if (padded != d) needs = true;
    d = padded;
  }
  if (!needs) return g;

  Grid out = g;
  out.dims = target;
  out.data.assign(num_nodes(target), 0.0);
  const int nx = g.dims[0], ny = g.dims[1];
  const int nz = g.ndim() == 3 ? g.dims[2] : 1;
  const int px = target[0], py = target[1];
  const int pz = g.ndim() == 3 ? target[2] : 1;
  std::size_t w = 0;
  for (int z = 0; z < pz; ++z)
    for (int y = 0; y < py; ++y)
      for (int x = 0; x < px; ++x)
        out.data[w++] = g.data[g.index(std::min(x, nx - 1), std::min(y, ny - 1),
                                       std::min(z, nz - 1))];
  return out;
}

template <typename Grid>
Grid crop_to(const Grid& g, const Extents& dims) {
  if (g.dims == dims) return g;
  Grid out = g;
  out.dims = dims;
  out.data.assign(num_nodes(dims), 0.0);
  const int nx = dims[0], ny = dims[1];
  const int nz = g.ndim() == 3 ? dims[2] : 1;
  std::size_t w = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        out.data[w++] = g.data[g.index(x, y, z)];
  return out;
}

DeformationField crop_field_to(const DeformationField& f, const Extents& dims) {
  if (f.dims == dims) return f;
  DeformationField out;
  out.dims = dims;
  out.spacing = f.spacing;
  const int ndim = f.ndim();
  out.data.assign(num_nodes(dims) * ndim, 0.0);
  const int nx = dims[0], ny = dims[1];
  const int nz = ndim == 3 ? dims[2] : 1;
  std::size_t w = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const std::size_t src = f.node(x, y, z) * ndim;
        for (int c = 0; c < ndim; ++c) out.data[w++] = f.data[src + c];
      }
  return out;
}

}  // namespace

SolveResult solve_single_level(const ScalarGrid& image, const MaskGrid& tmpl,
                               const MaskGrid& target, const SolveConfig& config) {
  validate(config);
  if (image.dims != tmpl.dims)
    throw std::invalid_argument("solve: image and template dims differ");
  if (image.dims != target.dims)
    throw std::invalid_argument("solve: image and target dims differ");
  validate_dims(image.dims);

  SolveResult res;
  res.field = make_identity_field(image.dims);
  res.soft_mask = warp_mask(tmpl, res.field);
  res.loss_history.push_back(total_loss(res.soft_mask, target, res.field, config.loss));

  if (res.loss_history.back().total != 0.0) {
    const std::size_t n = res.field.data.size();
    std::vector<double> m, v;
    if (config.optimizer == Optimizer::adaptive_moment) {
      m.assign(n, 0.0);
      v.assign(n, 0.0);
    }
    std::vector<double> update(n);

    // Adaptive-moment steps oscillate, so a single sub-tolerance loss change
    // is not convergence; require it for several consecutive iterations.
    constexpr int kConvergencePatience = 5;
    int quiet_iters = 0;

    for (int iter = 1; iter <= config.max_iters; ++iter) {
      std::vector<double> grad = total_loss_gradient(tmpl, target, res.field, config.loss);
      smooth_vector_field(res.field.dims, res.field.channels(), grad);

      if (config.optimizer == Optimizer::gradient_descent) {
        for (std::size_t i = 0; i < n; ++i) update[i] = config.step_size * grad[i];
      } else {
        const double bias1 = 1.0 - std::pow(kAdamBeta1, iter);
        const double bias2 = 1.0 - std::pow(kAdamBeta2, iter);
        for (std::size_t i = 0; i < n; ++i) {
          m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
          v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
          update[i] =
              config.step_size * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + kAdamFloor);
        }
      }
      smooth_vector_field(res.field.dims, res.field.channels(), update);
      for (std::size_t i = 0; i < n; ++i) res.field.data[i] -= update[i];

      res.soft_mask = warp_mask(tmpl, res.field);
      const LossBreakdown b = total_loss(res.soft_mask, target, res.field, config.loss);
      if (!std::isfinite(b.total)) {
        std::ostringstream msg;
        msg << "solve: non-finite loss at iteration " << iter
            << " (step_size " << config.step_size << " too large?)";
        throw std::runtime_error(msg.str());
      }
      const double prev = res.loss_history.back().total;
      res.loss_history.push_back(b);
      if (b.total == 0.0) break;
      const double rel = std::abs(b.total - prev) / std::max(std::abs(prev), 1e-300);
      quiet_iters = rel < config.convergence_tol ? quiet_iters + 1 : 0;
      if (quiet_iters >= kConvergencePatience) break;
    }
  }

  res.mask = binarize(res.soft_mask);
  const JacobianGrid jac = jacobian_determinant(res.field);
  res.topology = certify(res.mask, binarize(tmpl), &jac);
  return res;
}

SolveResult solve_multilevel(const ScalarGrid& image, const MaskGrid& tmpl,
                             const MaskGrid& target, int levels, const SolveConfig& config) {
  if (levels < 1) throw std::invalid_argument("solve_multilevel: levels must be >= 1");
  if (levels == 1) return solve_single_level(image, tmpl, target, config);
  validate(config);
  if (image.dims != tmpl.dims)
    throw std::invalid_argument("solve: image and template dims differ");
  if (image.dims != target.dims)
    throw std::invalid_argument("solve: image and target dims differ");

  const Extents original_dims = image.dims;
  const int multiple = 1 << (levels - 1);
  const ScalarGrid padded_image = pad_to_multiple(image, multiple);
  const MaskGrid padded_tmpl = pad_to_multiple(tmpl, multiple);
  const MaskGrid padded_target = pad_to_multiple(target, multiple);
  const bool padded = padded_image.dims != original_dims;

  SolveResult res;
  MaskGrid level_template;
  for (int level = 1; level <= levels; ++level) {
    const int factor = 1 << (levels - level);
    const ScalarGrid level_image = downsample(padded_image, factor);
    const MaskGrid level_target = downsample(padded_target, factor);
    if (level == 1)
      level_template = downsample(padded_tmpl, factor);
    else
      level_template = upsample(res.soft_mask, 2);
    res = solve_single_level(level_image, level_template, level_target, config);
  }

  if (padded) {
    res.field = crop_field_to(res.field, original_dims);
    res.soft_mask = crop_to(res.soft_mask, original_dims);
    res.mask = binarize(res.soft_mask);
    const JacobianGrid jac = jacobian_determinant(res.field);
    res.topology = certify(res.mask, binarize(tmpl), &jac);
  }
  return res;
}

MaskGrid derive_target_mask(const ScalarGrid& image, TargetMethod method,
                            const MaskGrid* provided) {
  if (method == TargetMethod::provided) {
    if (!provided) throw std::invalid_argument("derive_target_mask: no mask provided");
    return *provided;
  }

  // Otsu: 256-bin histogram over [0,1], maximize the between-class variance.
  constexpr int kBins = 256;
  std::array<std::size_t, kBins> hist{};
  for (double v : image.data) {
    const int bin = std::clamp(static_cast<int>(v * kBins), 0, kBins - 1);
    ++hist[static_cast<std::size_t>(bin)];
  }
  const double total = static_cast<double>(image.data.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += static_cast<double>(b) * hist[b];

  double best_var = -1.0;
  int best_t = -1;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += static_cast<double>(t) * hist[t];
    if (w0 == 0.0) continue;
    const double w1 = total - w0;
    if (w1 == 0.0) break;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  if (best_t < 0 || best_var <= 0.0)
    throw std::invalid_argument("derive_target_mask: constant-intensity image");

  const double threshold = static_cast<double>(best_t + 1) / kBins;
  MaskGrid mask = make_mask_grid(image.dims);
  mask.spacing = image.spacing;
  for (std::size_t i = 0; i < image.data.size(); ++i)
    mask.data[i] = image.data[i] >= threshold ? 1.0 : 0.0;
  return mask;
}

std::string loss_history_csv(const std::vector<LossBreakdown>& history) {
  std::ostringstream out;
  out.precision(17);
  out << "iter,dice,jacobian,laplacian,total\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << "," << history[i].dice << "," << history[i].jacobian << ","
        << history[i].laplacian << "," << history[i].total << "\n";
  return out.str();
}

}  // namespace tpseg
