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

#ifndef TPSEG_SYNTH_HPP
#define TPSEG_SYNTH_HPP

#include <cstdint>
#include <string>

#include "tpseg/grid.hpp"

namespace tpseg {

/// Desk-scale test shapes. disk/ball radius is 0.3125 * min(dims) (radius 20
/// on a 64x64 grid), centered; star geometry (arm phase, amplitude,
/// elongation) is drawn deterministically from the seed; two-blobs is a pair
/// of disjoint disks/balls.
enum class Shape { disk, ball, star, two_blobs };

Shape shape_from_name(const std::string& name);
const char* shape_name(Shape shape);

struct SynthConfig {
  Shape shape = Shape::disk;
  Extents dims;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  double template_frac = 0.6;            // template radius / label equivalent radius
  std::vector<double> template_offset;   // template center offset in pixels, default 0
};

struct SynthCase {
  ScalarGrid image;     // shape at 0.9 over background 0.1, plus clipped noise
  MaskGrid label;       // ground truth
  MaskGrid template_mask;  // centered disk/ball prior
};

SynthCase make_synth_case(const SynthConfig& config);

/// Filled disk (2D) or ball (3D) around an arbitrary continuous center.
MaskGrid make_blob_mask(const Extents& dims, const std::vector<double>& center,
                        double radius);

/// Star-shaped region: radius r0 * (1 + amplitude * cos(arms * theta + phase)),
/// optionally stretched along x. 2D only.
MaskGrid make_star_mask(const Extents& dims, const std::vector<double>& center, double r0,
                        int arms, double amplitude, double phase, double elongation);

/// Foreground 0.9 / background 0.1 plus clipped additive Gaussian noise.
ScalarGrid render_image(const MaskGrid& label, double noise_sd, std::uint64_t seed);

/// Zeroes slices lo..hi (inclusive) along the last axis of a 3D image.
/// lo > hi is an explicit no-op; out-of-range slices throw.
ScalarGrid corrupt_slices(const ScalarGrid& image, int lo, int hi);

}  // namespace tpseg

#endif  // TPSEG_SYNTH_HPP
