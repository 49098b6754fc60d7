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

#include "tpseg/topology.hpp"

#include <array>
#include <stdexcept>

namespace tpseg {

using nlohmann::json;

namespace {

struct Offset {
  int dx, dy, dz;
};

std::vector<Offset> neighbor_offsets(int ndim, Connectivity conn) {
  std::vector<Offset> offs;
  if (conn == Connectivity::face) {
    offs = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    if (ndim == 3) {
      offs.push_back({0, 0, 1});
      offs.push_back({0, 0, -1});
    }
    return offs;
  }
  const int zlo = ndim == 3 ? -1 : 0;
  const int zhi = ndim == 3 ? 1 : 0;
  for (int dz = zlo; dz <= zhi; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx != 0 || dy != 0 || dz != 0) offs.push_back({dx, dy, dz});
  return offs;
}

void require_binary(const MaskGrid& mask, const char* who) {
  if (!is_binary(mask)) throw std::invalid_argument(std::string(who) + ": mask must be binary");
}

// Flood labeling over an arbitrary predicate grid; used for foreground and
// (with full adjacency) background components.
ComponentLabels label_components(const Extents& dims, const std::vector<double>& data,
                                 double match_value, Connectivity conn) {
  const int ndim = static_cast<int>(dims.size());
  const int nx = dims[0], ny = dims[1];
  const int nz = ndim == 3 ? dims[2] : 1;
  const auto offs = neighbor_offsets(ndim, conn);

  ComponentLabels out;
  out.dims = dims;
  out.labels.assign(data.size(), 0);
  std::vector<std::size_t> queue;

  std::size_t idx = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++idx) {
        if (data[idx] != match_value || out.labels[idx] != 0) continue;
        const std::int32_t label = ++out.count;
        out.labels[idx] = label;
        queue.clear();
        queue.push_back(idx);
        while (!queue.empty()) {
          const std::size_t cur = queue.back();
          queue.pop_back();
          const int cx = static_cast<int>(cur % nx);
          const int cy = static_cast<int>((cur / nx) % ny);
          const int cz = static_cast<int>(cur / (static_cast<std::size_t>(nx) * ny));
          for (const Offset& o : offs) {
            const int px = cx + o.dx, py = cy + o.dy, pz = cz + o.dz;
            if (px < 0 || px >= nx || py < 0 || py >= ny || pz < 0 || pz >= nz) continue;
            const std::size_t ni =
                static_cast<std::size_t>(px) +
                static_cast<std::size_t>(nx) * (py + static_cast<std::size_t>(ny) * pz);
            if (data[ni] == match_value && out.labels[ni] == 0) {
              out.labels[ni] = label;
              queue.push_back(ni);
            }
          }
        }
      }
  return out;
}

}  // namespace

ComponentLabels connected_components(const MaskGrid& mask, Connectivity connectivity) {
  require_binary(mask, "connected_components");
  return label_components(mask.dims, mask.data, 1.0, connectivity);
}

long long euler_characteristic(const MaskGrid& mask) {
  require_binary(mask, "euler_characteristic");
  const int ndim = mask.ndim();
  const int nx = mask.dims[0], ny = mask.dims[1];
  const int nz = ndim == 3 ? mask.dims[2] : 1;

  auto fg = [&](int x, int y, int z) -> bool {
    if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return false;
    return mask.data[static_cast<std::size_t>(x) +
                     static_cast<std::size_t>(nx) *
                         (y + static_cast<std::size_t>(ny) * z)] == 1.0;
  };

  long long v = 0, e = 0, faces = 0, cells = 0;
  if (ndim == 2) {
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (fg(i - 1, j - 1, 0) || fg(i, j - 1, 0) || fg(i - 1, j, 0) || fg(i, j, 0)) ++v;
    for (int j = 0; j <= ny; ++j)  // edges along x
      for (int i = 0; i < nx; ++i)
        if (fg(i, j - 1, 0) || fg(i, j, 0)) ++e;
    for (int j = 0; j < ny; ++j)  // edges along y
      for (int i = 0; i <= nx; ++i)
        if (fg(i - 1, j, 0) || fg(i, j, 0)) ++e;
    for (std::size_t i = 0; i < mask.data.size(); ++i)
      if (mask.data[i] == 1.0) ++faces;
    return v - e + faces;
  }

  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        bool hit = false;
        for (int dz = -1; dz <= 0 && !hit; ++dz)
          for (int dy = -1; dy <= 0 && !hit; ++dy)
            for (int dx = -1; dx <= 0 && !hit; ++dx)
              if (fg(i + dx, j + dy, k + dz)) hit = true;
        if (hit) ++v;
      }
  // edges along x, y, z
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (fg(i, j - 1, k - 1) || fg(i, j, k - 1) || fg(i, j - 1, k) || fg(i, j, k)) ++e;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (fg(i - 1, j, k - 1) || fg(i, j, k - 1) || fg(i - 1, j, k) || fg(i, j, k)) ++e;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (fg(i - 1, j - 1, k) || fg(i, j - 1, k) || fg(i - 1, j, k) || fg(i, j, k)) ++e;
  // faces normal to z, y, x
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (fg(i, j, k - 1) || fg(i, j, k)) ++faces;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (fg(i, j - 1, k) || fg(i, j, k)) ++faces;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (fg(i - 1, j, k) || fg(i, j, k)) ++faces;
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    if (mask.data[i] == 1.0) ++cells;
  return v - e + faces - cells;
}

MaskGrid cca_postprocess(const MaskGrid& mask, bool fill_holes, bool* empty_warning) {
  require_binary(mask, "cca_postprocess");
  if (empty_warning) *empty_warning = false;

  const ComponentLabels comps = label_components(mask.dims, mask.data, 1.0, Connectivity::face);
  if (comps.count == 0) {
    if (empty_warning) *empty_warning = true;
    return mask;
  }

  std::vector<std::size_t> area(static_cast<std::size_t>(comps.count) + 1, 0);
  for (std::int32_t l : comps.labels)
    if (l > 0) ++area[static_cast<std::size_t>(l)];
  std::int32_t best = 1;
  for (std::int32_t l = 2; l <= comps.count; ++l)
    if (area[static_cast<std::size_t>(l)] > area[static_cast<std::size_t>(best)]) best = l;

  MaskGrid out = mask;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = comps.labels[i] == best ? 1.0 : 0.0;

  if (fill_holes) {
    // Background components under full adjacency; those not touching the
    // border are holes of the kept component.
    const ComponentLabels bg =
        label_components(out.dims, out.data, 0.0, Connectivity::full);
    std::vector<bool> touches_border(static_cast<std::size_t>(bg.count) + 1, false);
    const int nx = out.dims[0], ny = out.dims[1];
    const int nz = out.ndim() == 3 ? out.dims[2] : 1;
    std::size_t idx = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x, ++idx) {
          if (bg.labels[idx] == 0) continue;
          const bool border = x == 0 || x == nx - 1 || y == 0 || y == ny - 1 ||
                              (out.ndim() == 3 && (z == 0 || z == nz - 1));
          if (border) touches_border[static_cast<std::size_t>(bg.labels[idx])] = true;
        }
    for (std::size_t i = 0; i < out.data.size(); ++i)
      if (bg.labels[i] > 0 && !touches_border[static_cast<std::size_t>(bg.labels[i])])
        out.data[i] = 1.0;
  }
  return out;
}

TopologyReport certify(const MaskGrid& pred, const MaskGrid& tmpl, const JacobianGrid* jac) {
  require_binary(pred, "certify");
  require_binary(tmpl, "certify");

  TopologyReport report;
  report.component_count = connected_components(pred, Connectivity::face).count;
  report.euler_characteristic = euler_characteristic(pred);

  const int tmpl_components = connected_components(tmpl, Connectivity::face).count;
  const long long tmpl_euler = euler_characteristic(tmpl);
  report.matches_template = report.component_count == tmpl_components &&
                            report.euler_characteristic == tmpl_euler;

  if (jac) {
    report.min_determinant = min_determinant(*jac);
    long long folds = 0;
    for (double det : jac->data)
      if (det <= 0.0) ++folds;
    report.fold_cell_count = folds;
  }
  return report;
}

void to_json(json& j, const TopologyReport& report) {
  j = json{{"component_count", report.component_count},
           {"euler_characteristic", report.euler_characteristic},
           {"min_determinant", report.min_determinant ? json(*report.min_determinant)
                                                      : json(nullptr)},
           {"fold_cell_count", report.fold_cell_count},
           {"matches_template", report.matches_template}};
}

}  // namespace tpseg
