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

#include "tpseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tpseg {

namespace {

std::vector<double> grid_center(const Extents& dims) {
  std::vector<double> c(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) c[k] = (dims[k] - 1) / 2.0;
  return c;
}

int min_extent(const Extents& dims) { return *std::min_element(dims.begin(), dims.end()); }

double equivalent_radius(const MaskGrid& label) {
  std::size_t area = 0;
  for (double v : label.data)
    if (v == 1.0) ++area;
  if (label.ndim() == 2) return std::sqrt(static_cast<double>(area) / std::numbers::pi);
  return std::cbrt(3.0 * static_cast<double>(area) / (4.0 * std::numbers::pi));
}

}  // namespace

Shape shape_from_name(const std::string& name) {
  if (name == "disk") return Shape::disk;
  if (name == "ball") return Shape::ball;
  if (name == "star") return Shape::star;
  if (name == "two-blobs") return Shape::two_blobs;
  throw std::invalid_argument("unknown shape '" + name + "'");
}

const char* shape_name(Shape shape) {
  switch (shape) {
    case Shape::disk: return "disk";
    case Shape::ball: return "ball";
    case Shape::star: return "star";
    case Shape::two_blobs: return "two-blobs";
  }
  return "disk";
}

MaskGrid make_blob_mask(const Extents& dims, const std::vector<double>& center,
                        double radius) {
  validate_dims(dims);
  if (center.size() != dims.size())
    throw std::invalid_argument("make_blob_mask: center has wrong dimension");
  MaskGrid m = make_mask_grid(dims);
  const int nx = dims[0], ny = dims[1];
  const int nz = dims.size() == 3 ? dims[2] : 1;
  const double r2 = radius * radius;
  std::size_t w = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++w) {
        double d2 = (x - center[0]) * (x - center[0]) + (y - center[1]) * (y - center[1]);
        if (dims.size() == 3) d2 += (z - center[2]) * (z - center[2]);
        m.data[w] = d2 <= r2 ? 1.0 : 0.0;
      }
  return m;
}

MaskGrid make_star_mask(const Extents& dims, const std::vector<double>& center, double r0,
                        int arms, double amplitude, double phase, double elongation) {
  if (dims.size() != 2) throw std::invalid_argument("make_star_mask: 2D only");
  validate_dims(dims);
  MaskGrid m = make_mask_grid(dims);
  std::size_t w = 0;
  for (int y = 0; y < dims[1]; ++y)
    for (int x = 0; x < dims[0]; ++x, ++w) {
      const double dx = (x - center[0]) / elongation;
      const double dy = y - center[1];
      const double rho = std::hypot(dx, dy);
      const double theta = std::atan2(dy, dx);
      const double r = r0 * (1.0 + amplitude * std::cos(arms * theta + phase));
      m.data[w] = rho <= r ? 1.0 : 0.0;
    }
  return m;
}

ScalarGrid render_image(const MaskGrid& label, double noise_sd, std::uint64_t seed) {
  ScalarGrid img;
  img.dims = label.dims;
  img.spacing = label.spacing;
  img.data.resize(label.data.size());
  for (std::size_t i = 0; i < label.data.size(); ++i)
    img.data[i] = 0.1 + 0.8 * label.data[i];
  if (noise_sd > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);
    for (auto& v : img.data) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  return img;
}

ScalarGrid corrupt_slices(const ScalarGrid& image, int lo, int hi) {
  if (image.ndim() != 3)
    throw std::invalid_argument("corrupt_slices: image must be 3D");
  ScalarGrid out = image;
  if (lo > hi) return out;  // empty range
  const int nz = image.dims[2];
  if (lo < 0 || hi >= nz)
    throw std::invalid_argument("corrupt_slices: slice range out of bounds");
  const std::size_t slice = static_cast<std::size_t>(image.dims[0]) * image.dims[1];
  for (int z = lo; z <= hi; ++z)
    std::fill_n(out.data.begin() + static_cast<std::ptrdiff_t>(slice) * z, slice, 0.0);
  return out;
}

SynthCase make_synth_case(const SynthConfig& config) {
  validate_dims(config.dims);
  if (!(config.template_frac > 0.0))
    throw std::invalid_argument("synth: template_frac must be positive");
  const int ndim = static_cast<int>(config.dims.size());
  if (config.shape == Shape::ball && ndim != 3)
    throw std::invalid_argument("synth: ball requires 3D dims");
  if (config.shape == Shape::star && ndim != 2)
    throw std::invalid_argument("synth: star requires 2D dims");

  const std::vector<double> center = grid_center(config.dims);
  const double base_radius = 0.3125 * min_extent(config.dims);
  std::mt19937_64 rng(config.seed);

  if (config.shape == Shape::disk && ndim != 2)
    throw std::invalid_argument("synth: disk requires 2D dims");

  SynthCase out;
  switch (config.shape) {
    case Shape::disk:
      out.label = make_blob_mask(config.dims, center, base_radius);
      break;
    case Shape::ball:
      out.label = make_blob_mask(config.dims, center, base_radius);
      break;
    case Shape::star: {
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> amp(0.2, 0.3);
      std::uniform_real_distribution<double> elong(1.0, 1.25);
      const double ph = phase(rng);
      const double a = amp(rng);
      const double e = elong(rng);
      out.label = make_star_mask(config.dims, center, 0.28 * min_extent(config.dims), 5, a,
                                 ph, e);
      break;
    }
    case Shape::two_blobs: {
      const double r = 0.17 * min_extent(config.dims);
      const double off = 0.24 * min_extent(config.dims);
      std::vector<double> c1 = center, c2 = center;
      c1[0] -= off;
      c2[0] += off;
      const MaskGrid a = make_blob_mask(config.dims, c1, r);
      const MaskGrid b = make_blob_mask(config.dims, c2, r);
      out.label = a;
      for (std::size_t i = 0; i < out.label.data.size(); ++i)
        out.label.data[i] = std::max(a.data[i], b.data[i]);
      break;
    }
  }

  std::vector<double> tmpl_center = center;
  if (!config.template_offset.empty()) {
    if (config.template_offset.size() != config.dims.size())
      throw std::invalid_argument("synth: template_offset has wrong dimension");
    for (std::size_t k = 0; k < tmpl_center.size(); ++k)
      tmpl_center[k] += config.template_offset[k];
  }
  out.template_mask = make_blob_mask(config.dims, tmpl_center,
                                     config.template_frac * equivalent_radius(out.label));
  out.image = render_image(out.label, config.noise_sd, rng());
  return out;
}

}  // namespace tpseg
