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

// Test-only oracles and fixture builders. Everything here recomputes expected
// values from first principles (finite differences, recursive flood fill,
// explicit cell-set counting) and stays independent of the library's
// implementation paths.

#ifndef TPSEG_TESTS_HELPERS_HPP
#define TPSEG_TESTS_HELPERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "tpseg/deform.hpp"
#include "tpseg/grid.hpp"
#include "tpseg/loss.hpp"
#include "tpseg/topology.hpp"

namespace tpseg::testing {

// ---------------------------------------------------------------------------
// fixture builders

/// f(x) = A*x + b. A is row-major D x D.
inline DeformationField make_affine_field(const Extents& dims,
                                          const std::vector<double>& a,
                                          const std::vector<double>& b) {
  DeformationField f = make_identity_field(dims);
  const int ndim = f.ndim();
  const std::size_t n = num_nodes(dims);
  std::vector<double> x(ndim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < ndim; ++c) x[c] = f.data[i * ndim + c];
    for (int r = 0; r < ndim; ++r) {
      double acc = b[r];
      for (int c = 0; c < ndim; ++c) acc += a[r * ndim + c] * x[c];
      f.data[i * ndim + static_cast<std::size_t>(r)] = acc;
    }
  }
  return f;
}

/// Identity plus a few low-frequency sinusoids per channel; amplitude keeps
/// the field away from heavy folding for gradient checks.
inline DeformationField make_smooth_random_field(const Extents& dims, std::uint64_t seed,
                                                 double amplitude = 0.4) {
  DeformationField f = make_identity_field(dims);
  const int ndim = f.ndim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> amp(-amplitude, amplitude);
  std::uniform_int_distribution<int> wave(1, 2);

  for (int c = 0; c < ndim; ++c) {
    std::vector<double> k(ndim), ph(ndim);
    const double a = amp(rng);
    for (int d = 0; d < ndim; ++d) {
      k[d] = 6.283185307179586 * wave(rng) / dims[d];
      ph[d] = phase(rng);
    }
    const int nx = dims[0], ny = dims[1];
    const int nz = ndim == 3 ? dims[2] : 1;
    std::size_t i = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x, ++i) {
          double s = std::sin(k[0] * x + ph[0]) * std::sin(k[1] * y + ph[1]);
          if (ndim == 3) s *= std::sin(k[2] * z + ph[2]);
          f.data[i * ndim + static_cast<std::size_t>(c)] += a * s;
        }
  }
  return f;
}

/// Soft mask with smoothly varying values in [0,1].
inline MaskGrid make_smooth_random_mask(const Extents& dims, std::uint64_t seed) {
  MaskGrid m = make_mask_grid(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> freq(0.5, 1.5);
  const double kx = 6.283185307179586 * freq(rng) / dims[0];
  const double ky = 6.283185307179586 * freq(rng) / dims[1];
  const double kz = dims.size() == 3 ? 6.283185307179586 * freq(rng) / dims[2] : 0.0;
  const double p0 = phase(rng), p1 = phase(rng), p2 = phase(rng);
  const int nx = dims[0], ny = dims[1];
  const int nz = dims.size() == 3 ? dims[2] : 1;
  std::size_t i = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++i) {
        double s = 0.5 + 0.45 * std::sin(kx * x + p0) * std::sin(ky * y + p1);
        if (dims.size() == 3) s += 0.05 * std::sin(kz * z + p2);
        m.data[i] = std::clamp(s, 0.0, 1.0);
      }
  return m;
}

inline MaskGrid make_random_binary_mask(const Extents& dims, std::uint64_t seed,
                                        double density = 0.5) {
  MaskGrid m = make_mask_grid(dims);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution fg(density);
  for (auto& v : m.data) v = fg(rng) ? 1.0 : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// finite-difference gradient oracle

inline double total_with_warp(const MaskGrid& tmpl, const MaskGrid& label,
                              const DeformationField& f, const LossConfig& cfg) {
  return total_loss(warp_mask(tmpl, f), label, f, cfg).total;
}

inline std::vector<double> finite_difference_gradient(const MaskGrid& tmpl,
                                                      const MaskGrid& label,
                                                      const DeformationField& f,
                                                      const LossConfig& cfg,
                                                      double h = 1e-4) {
  std::vector<double> g(f.data.size());
  DeformationField probe = f;
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    probe.data[i] = f.data[i] + h;
    const double up = total_with_warp(tmpl, label, probe, cfg);
    probe.data[i] = f.data[i] - h;
    const double dn = total_with_warp(tmpl, label, probe, cfg);
    probe.data[i] = f.data[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

/// Marks coordinates where a +-h probe could cross a non-smooth point:
/// interpolation cell boundaries (integer coordinate values), the det=epsilon
/// ReLU kink of any incident cell, and the |lap|=0 kink of any stencil
/// touching the node. Margins are sized for h = 1e-4 probes.
inline std::vector<bool> kink_adjacent(const DeformationField& f, const LossConfig& cfg,
                                       double int_tol = 2e-4, double kink_tol = 2e-3) {
  const int ndim = f.ndim();
  const int nx = f.dims[0], ny = f.dims[1];
  const int nz = ndim == 3 ? f.dims[2] : 1;
  std::vector<bool> excluded(f.data.size(), false);

  for (std::size_t i = 0; i < f.data.size(); ++i) {
    const double v = f.data[i];
    if (std::abs(v - std::round(v)) < int_tol) excluded[i] = true;
  }

  auto exclude_node = [&](int x, int y, int z) {
    if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return;
    const std::size_t node =
        static_cast<std::size_t>(x) +
        static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
    for (int c = 0; c < ndim; ++c) excluded[node * ndim + static_cast<std::size_t>(c)] = true;
  };

  const JacobianGrid jac = jacobian_determinant(f);
  {
    const int cx = jac.dims[0], cy = jac.dims[1];
    const int cz = ndim == 3 ? jac.dims[2] : 1;
    std::size_t i = 0;
    for (int z = 0; z < cz; ++z)
      for (int y = 0; y < cy; ++y)
        for (int x = 0; x < cx; ++x, ++i)
          if (std::abs(jac.data[i] - cfg.epsilon) < kink_tol) {
            // every node of the cell
            for (int dz = 0; dz <= (ndim == 3 ? 1 : 0); ++dz)
              for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx) exclude_node(x + dx, y + dy, z + dz);
          }
  }

  if (*std::min_element(f.dims.begin(), f.dims.end()) >= 3) {
    const LaplacianGrid lap = laplacian(f);
    const int lx = lap.dims[0], ly = lap.dims[1];
    const int lz = ndim == 3 ? lap.dims[2] : 1;
    std::size_t i = 0;
    for (int z = 0; z < lz; ++z)
      for (int y = 0; y < ly; ++y)
        for (int x = 0; x < lx; ++x)
          for (int c = 0; c < ndim; ++c, ++i)
            if (std::abs(lap.data[i]) < kink_tol) {
              // interior node is (x+1, y+1, z+1); the stencil touches it and
              // its axis neighbors
              const int ix = x + 1, iy = y + 1, iz = ndim == 3 ? z + 1 : 0;
              exclude_node(ix, iy, iz);
              exclude_node(ix + 1, iy, iz);
              exclude_node(ix - 1, iy, iz);
              exclude_node(ix, iy + 1, iz);
              exclude_node(ix, iy - 1, iz);
              if (ndim == 3) {
                exclude_node(ix, iy, iz + 1);
                exclude_node(ix, iy, iz - 1);
              }
            }
  }
  return excluded;
}

/// Largest relative mismatch between analytic and finite-difference gradients
/// over non-excluded coordinates.
inline double max_gradient_error(const std::vector<double>& analytic,
                                 const std::vector<double>& fd,
                                 const std::vector<bool>& excluded) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (excluded[i]) continue;
    const double denom = std::max({std::abs(analytic[i]), std::abs(fd[i]), 1e-4});
    worst = std::max(worst, std::abs(analytic[i] - fd[i]) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// topology oracles

namespace oracle_detail {
inline void flood_recursive(const MaskGrid& m, std::vector<int>& labels, int x, int y, int z,
                            int label, bool full) {
  const int nx = m.dims[0], ny = m.dims[1];
  const int nz = m.ndim() == 3 ? m.dims[2] : 1;
  if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return;
  const std::size_t i =
      static_cast<std::size_t>(x) +
      static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
  if (m.data[i] != 1.0 || labels[i] != 0) return;
  labels[i] = label;
  const int zlo = m.ndim() == 3 ? -1 : 0;
  const int zhi = m.ndim() == 3 ? 1 : 0;
  for (int dz = zlo; dz <= zhi; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        if (!full && std::abs(dx) + std::abs(dy) + std::abs(dz) != 1) continue;
        flood_recursive(m, labels, x + dx, y + dy, z + dz, label, full);
      }
}
}  // namespace oracle_detail

/// Label-agnostic partition equality between two labelings of the same mask.
template <typename LabelA, typename LabelB>
bool same_partition(const std::vector<LabelA>& a, const std::vector<LabelB>& b) {
  std::map<LabelA, LabelB> fwd;
  std::map<LabelB, LabelA> bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == 0) != (b[i] == 0)) return false;
    if (a[i] == 0) continue;
    auto [it_f, fresh_f] = fwd.emplace(a[i], b[i]);
    if (!fresh_f && it_f->second != b[i]) return false;
    auto [it_b, fresh_b] = bwd.emplace(b[i], a[i]);
    if (!fresh_b && it_b->second != a[i]) return false;
  }
  return true;
}

/// Independent recursive flood fill; returns the component count and fills
/// labels in scan order.
inline int flood_fill_oracle(const MaskGrid& m, bool full_connectivity,
                             std::vector<int>& labels) {
  const int nx = m.dims[0], ny = m.dims[1];
  const int nz = m.ndim() == 3 ? m.dims[2] : 1;
  labels.assign(m.data.size(), 0);
  int count = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const std::size_t i =
            static_cast<std::size_t>(x) +
            static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
        if (m.data[i] == 1.0 && labels[i] == 0)
          oracle_detail::flood_recursive(m, labels, x, y, z, ++count, full_connectivity);
      }
  return count;
}

/// Euler characteristic by explicit cell-set construction: insert every
/// vertex/edge/face(/cube) of each foreground pixel into sets and count.
inline long long euler_oracle(const MaskGrid& m) {
  const int nx = m.dims[0], ny = m.dims[1];
  if (m.ndim() == 2) {
    std::set<std::array<int, 2>> verts;
    std::set<std::array<int, 3>> edges;  // (axis, x, y) of min corner
    long long faces = 0;
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (m.at(x, y) != 1.0) continue;
        ++faces;
        for (int dy = 0; dy <= 1; ++dy)
          for (int dx = 0; dx <= 1; ++dx) verts.insert({x + dx, y + dy});
        edges.insert({0, x, y});
        edges.insert({0, x, y + 1});
        edges.insert({1, x, y});
        edges.insert({1, x + 1, y});
      }
    return static_cast<long long>(verts.size()) - static_cast<long long>(edges.size()) +
           faces;
  }

  const int nz = m.dims[2];
  std::set<std::array<int, 3>> verts;
  std::set<std::array<int, 4>> edges;  // (axis, x, y, z)
  std::set<std::array<int, 4>> faces;  // (normal axis, x, y, z)
  long long cubes = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (m.at(x, y, z) != 1.0) continue;
        ++cubes;
        for (int dz = 0; dz <= 1; ++dz)
          for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) verts.insert({x + dx, y + dy, z + dz});
        for (int dz = 0; dz <= 1; ++dz)
          for (int dy = 0; dy <= 1; ++dy) edges.insert({0, x, y + dy, z + dz});
        for (int dz = 0; dz <= 1; ++dz)
          for (int dx = 0; dx <= 1; ++dx) edges.insert({1, x + dx, y, z + dz});
        for (int dy = 0; dy <= 1; ++dy)
          for (int dx = 0; dx <= 1; ++dx) edges.insert({2, x + dx, y + dy, z});
        faces.insert({2, x, y, z});
        faces.insert({2, x, y, z + 1});
        faces.insert({1, x, y, z});
        faces.insert({1, x, y + 1, z});
        faces.insert({0, x, y, z});
        faces.insert({0, x + 1, y, z});
      }
  return static_cast<long long>(verts.size()) - static_cast<long long>(edges.size()) +
         static_cast<long long>(faces.size()) - cubes;
}

/// Symmetric Hausdorff distance between the foreground point sets, in pixels.
inline double hausdorff_distance(const MaskGrid& a, const MaskGrid& b) {
  auto points = [](const MaskGrid& m) {
    std::vector<std::array<int, 3>> pts;
    const int nx = m.dims[0], ny = m.dims[1];
    const int nz = m.ndim() == 3 ? m.dims[2] : 1;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
          if (m.data[static_cast<std::size_t>(x) +
                     static_cast<std::size_t>(nx) *
                         (y + static_cast<std::size_t>(ny) * z)] == 1.0)
            pts.push_back({x, y, z});
    return pts;
  };
  const auto pa = points(a);
  const auto pb = points(b);
  if (pa.empty() || pb.empty()) return pa.empty() && pb.empty() ? 0.0 : 1e9;
  auto directed = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = 1e18;
      for (const auto& q : to) {
        const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace tpseg::testing

#endif  // TPSEG_TESTS_HELPERS_HPP
