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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "helpers.hpp"
#include "tpseg/synth.hpp"
#include "tpseg/topology.hpp"

using namespace tpseg;
using namespace tpseg::testing;

namespace {

MaskGrid mask_from_rows(const std::vector<std::string>& rows) {
  MaskGrid m = make_mask_grid({static_cast<int>(rows[0].size()),
                               static_cast<int>(rows.size())});
  for (std::size_t y = 0; y < rows.size(); ++y)
    for (std::size_t x = 0; x < rows[y].size(); ++x)
      m.data[y * rows[y].size() + x] = rows[y][x] == '#' ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST_CASE("connected_components") {
  SUBCASE("empty mask has zero components") {
    const ComponentLabels cc =
        connected_components(make_mask_grid({4, 4}), Connectivity::face);
    CHECK(cc.count == 0);
  }
  SUBCASE("diagonal pixels: face splits, full joins") {
    const MaskGrid m = mask_from_rows({
        "#...",
        ".#..",
        "....",
    });
    CHECK(connected_components(m, Connectivity::face).count == 2);
    CHECK(connected_components(m, Connectivity::full).count == 1);
  }
  SUBCASE("labels follow scan order") {
    const MaskGrid m = mask_from_rows({
        ".#.#",
        "....",
        "#...",
    });
    const ComponentLabels cc = connected_components(m, Connectivity::face);
    CHECK(cc.count == 3);
    CHECK(cc.labels[1] == 1);
    CHECK(cc.labels[3] == 2);
    CHECK(cc.labels[8] == 3);
  }
  SUBCASE("agrees with the recursive flood-fill oracle") {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    for (int trial = 0; trial < 300; ++trial) {
      const MaskGrid m = make_random_binary_mask({16, 16}, rng(), density(rng));
      for (bool full : {false, true}) {
        std::vector<int> expect_labels;
        const int expect =
            flood_fill_oracle(m, full, expect_labels);
        const ComponentLabels cc = connected_components(
            m, full ? Connectivity::full : Connectivity::face);
        CHECK(cc.count == expect);
        CHECK(same_partition(cc.labels, expect_labels));
      }
    }
  }
  SUBCASE("3D face vs full") {
    MaskGrid m = make_mask_grid({3, 3, 3});
    m.data[m.index(0, 0, 0)] = 1.0;
    m.data[m.index(1, 1, 1)] = 1.0;  // touches only diagonally
    CHECK(connected_components(m, Connectivity::face).count == 2);
    CHECK(connected_components(m, Connectivity::full).count == 1);
  }
  SUBCASE("non-binary input is rejected") {
    MaskGrid m = make_mask_grid({4, 4}, 0.5);
    CHECK_THROWS_AS(connected_components(m, Connectivity::face), std::invalid_argument);
  }
}

TEST_CASE("euler_characteristic") {
  SUBCASE("filled block is contractible") {
    const MaskGrid m = mask_from_rows({
        ".....",
        ".###.",
        ".###.",
        ".###.",
        ".....",
    });
    CHECK(euler_characteristic(m) == 1);
  }
  SUBCASE("square annulus has one hole") {
    const MaskGrid m = mask_from_rows({
        ".....",
        ".###.",
        ".#.#.",
        ".###.",
        ".....",
    });
    CHECK(euler_characteristic(m) == 0);
  }
  SUBCASE("two separated blocks add up") {
    const MaskGrid m = mask_from_rows({
        "##..##",
        "##..##",
    });
    CHECK(euler_characteristic(m) == 2);
  }
  SUBCASE("matches the explicit cell-set oracle on random masks") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    for (int trial = 0; trial < 200; ++trial) {
      const MaskGrid m = make_random_binary_mask({8, 8}, rng(), density(rng));
      CHECK(euler_characteristic(m) == euler_oracle(m));
    }
    for (int trial = 0; trial < 60; ++trial) {
      const MaskGrid m = make_random_binary_mask({5, 5, 5}, rng(), density(rng));
      CHECK(euler_characteristic(m) == euler_oracle(m));
    }
  }
  SUBCASE("solid 3D ball is contractible, hollow shell is not") {
    const MaskGrid ball = make_blob_mask({16, 16, 16}, {7.5, 7.5, 7.5}, 5.0);
    CHECK(euler_characteristic(ball) == 1);
    MaskGrid shell = ball;
    const MaskGrid inner = make_blob_mask({16, 16, 16}, {7.5, 7.5, 7.5}, 3.0);
    for (std::size_t i = 0; i < shell.data.size(); ++i)
      if (inner.data[i] == 1.0) shell.data[i] = 0.0;
    CHECK(euler_characteristic(shell) == 2);  // sphere-like
  }
  SUBCASE("additivity over well-separated unions") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
      const MaskGrid a = make_random_binary_mask({6, 6}, rng(), 0.5);
      const MaskGrid b = make_random_binary_mask({6, 6}, rng(), 0.5);
      MaskGrid joined = make_mask_grid({14, 6});
      for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) {
          joined.data[joined.index(x, y)] = a.at(x, y);
          joined.data[joined.index(x + 8, y)] = b.at(x, y);
        }
      CHECK(euler_characteristic(joined) ==
            euler_characteristic(a) + euler_characteristic(b));
    }
  }
}

TEST_CASE("cca_postprocess") {
  SUBCASE("keeps the largest component only") {
    MaskGrid m = make_mask_grid({20, 20});
    const MaskGrid big = make_blob_mask({20, 20}, {6.0, 6.0}, 5.0);    // ~78 px
    const MaskGrid small = make_blob_mask({20, 20}, {16.0, 16.0}, 1.5);
    for (std::size_t i = 0; i < m.data.size(); ++i)
      m.data[i] = std::max(big.data[i], small.data[i]);
    m.data[m.index(0, 19)] = 1.0;  // isolated speck
    const MaskGrid kept = cca_postprocess(m);
    CHECK(kept.data == big.data);
  }
  SUBCASE("idempotent and single-component input unchanged") {
    const MaskGrid one = make_blob_mask({12, 12}, {5.5, 5.5}, 3.0);
    const MaskGrid once = cca_postprocess(one);
    CHECK(once.data == one.data);
    const MaskGrid twice = cca_postprocess(once);
    CHECK(twice.data == once.data);
  }
  SUBCASE("never grows the foreground") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const MaskGrid m = make_random_binary_mask({12, 12}, rng(), 0.4);
      const MaskGrid kept = cca_postprocess(m);
      std::size_t before = 0, after = 0;
      for (double v : m.data) before += v == 1.0;
      for (double v : kept.data) after += v == 1.0;
      CHECK(after <= before);
    }
  }
  SUBCASE("equal sizes: earliest scan-order component wins") {
    const MaskGrid m = mask_from_rows({
        ".....",
        ".#.#.",
        ".....",
    });
    const MaskGrid kept = cca_postprocess(m);
    CHECK(kept.at(1, 1) == 1.0);
    CHECK(kept.at(3, 1) == 0.0);
  }
  SUBCASE("empty mask returns unchanged with a warning") {
    bool warned = false;
    const MaskGrid empty = make_mask_grid({4, 4});
    const MaskGrid kept = cca_postprocess(empty, false, &warned);
    CHECK(warned);
    CHECK(kept.data == empty.data);
  }
  SUBCASE("optional hole filling") {
    const MaskGrid ring = mask_from_rows({
        ".....",
        ".###.",
        ".#.#.",
        ".###.",
        ".....",
    });
    const MaskGrid kept = cca_postprocess(ring, /*fill_holes=*/true);
    CHECK(kept.at(2, 2) == 1.0);
    CHECK(euler_characteristic(kept) == 1);
    const MaskGrid unfilled = cca_postprocess(ring);
    CHECK(unfilled.at(2, 2) == 0.0);
  }
}

TEST_CASE("certify") {
  const MaskGrid disk = make_blob_mask({24, 24}, {11.5, 11.5}, 7.0);
  SUBCASE("prediction equal to the template matches") {
    const TopologyReport r = certify(disk, disk);
    CHECK(r.matches_template);
    CHECK(r.component_count == 1);
    CHECK(r.euler_characteristic == 1);
    CHECK(!r.min_determinant.has_value());
    CHECK(r.fold_cell_count == 0);
  }
  SUBCASE("two blobs against a one-blob template do not match") {
    MaskGrid two = make_mask_grid({24, 24});
    const MaskGrid a = make_blob_mask({24, 24}, {6.0, 6.0}, 3.0);
    const MaskGrid b = make_blob_mask({24, 24}, {17.0, 17.0}, 3.0);
    for (std::size_t i = 0; i < two.data.size(); ++i)
      two.data[i] = std::max(a.data[i], b.data[i]);
    const TopologyReport r = certify(two, disk);
    CHECK(!r.matches_template);
    CHECK(r.component_count == 2);
  }
  SUBCASE("jacobian evidence is copied in") {
    const DeformationField f =
        make_affine_field({24, 24}, {0.4, 0.0, 0.0, 1.0}, {7.0, 0.0});
    const JacobianGrid jac = jacobian_determinant(f);
    const TopologyReport r = certify(disk, disk, &jac);
    REQUIRE(r.min_determinant.has_value());
    CHECK(*r.min_determinant == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.fold_cell_count == 0);
  }
  SUBCASE("json has exactly the five fields") {
    const TopologyReport r = certify(disk, disk);
    const nlohmann::json j = r;
    CHECK(j.size() == 5);
    CHECK(j.at("component_count") == 1);
    CHECK(j.at("euler_characteristic") == 1);
    CHECK(j.at("min_determinant").is_null());
    CHECK(j.at("fold_cell_count") == 0);
    CHECK(j.at("matches_template") == true);
  }
}
