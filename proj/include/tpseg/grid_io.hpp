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

#ifndef TPSEG_GRID_IO_HPP
#define TPSEG_GRID_IO_HPP

#include <filesystem>
#include <string_view>

#include "tpseg/grid.hpp"

namespace tpseg {

enum class GridKind { scalar, mask, field };

/// Raw grid format: little-endian float32 values in node-major order
/// (channel fastest within a node), plus a JSON sidecar at <path>.json with
/// {"dims":[...],"spacing":[...],"channels":n,"kind":"scalar|mask|field"}.
void save_raw(const ScalarGrid& grid, const std::filesystem::path& path);
void save_raw(const MaskGrid& grid, const std::filesystem::path& path);
void save_raw(const DeformationField& field, const std::filesystem::path& path);

GridKind peek_raw_kind(const std::filesystem::path& path);
ScalarGrid load_raw_scalar(const std::filesystem::path& path);
MaskGrid load_raw_mask(const std::filesystem::path& path);
DeformationField load_raw_field(const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255), 2D grids only. Values are clamped to [0,1],
/// scaled by 255 and rounded on export; divided by 255 on import.
void save_pgm(const ScalarGrid& grid, const std::filesystem::path& path);
void save_pgm(const MaskGrid& grid, const std::filesystem::path& path);
ScalarGrid load_pgm_scalar(const std::filesystem::path& path);
MaskGrid load_pgm_mask(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

/// Writes to a temporary file in the target directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tpseg

#endif  // TPSEG_GRID_IO_HPP
