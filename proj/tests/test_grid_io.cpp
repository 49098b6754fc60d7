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

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "helpers.hpp"
#include "tpseg/grid_io.hpp"

using namespace tpseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tpseg_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("raw round trip preserves float32 payload and metadata") {
  TempDir tmp;
  SUBCASE("scalar") {
    ScalarGrid g = make_scalar_grid({5, 4});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto& v : g.data) v = static_cast<float>(u(rng));  // float-exact values
    g.spacing = {0.5, 2.0};
    save_raw(g, tmp.path / "g.raw");
    const ScalarGrid back = load_raw_scalar(tmp.path / "g.raw");
    CHECK(back.dims == g.dims);
    CHECK(back.spacing == g.spacing);
    CHECK(back.data == g.data);
    CHECK(peek_raw_kind(tmp.path / "g.raw") == GridKind::scalar);
  }
  SUBCASE("mask keeps binary payload exactly") {
    const MaskGrid m = testing::make_random_binary_mask({6, 5, 4}, 7);
    save_raw(m, tmp.path / "m.raw");
    const MaskGrid back = load_raw_mask(tmp.path / "m.raw");
    CHECK(back.data == m.data);
    CHECK(back.threshold == 0.5);
  }
  SUBCASE("field stores node-major channels") {
    const DeformationField f = testing::make_smooth_random_field({4, 5, 3}, 11, 0.25);
    save_raw(f, tmp.path / "f.raw");
    const DeformationField back = load_raw_field(tmp.path / "f.raw");
    CHECK(back.dims == f.dims);
    REQUIRE(back.data.size() == f.data.size());
    for (std::size_t i = 0; i < f.data.size(); ++i)
      CHECK(back.data[i] == doctest::Approx(f.data[i]).epsilon(1e-6));
    // identity survives the float32 round trip bit-exactly
    save_raw(make_identity_field({8, 8}), tmp.path / "id.raw");
    CHECK(load_raw_field(tmp.path / "id.raw").data == make_identity_field({8, 8}).data);
  }
}

TEST_CASE("sidecar validation names the offending field") {
  TempDir tmp;
  const fs::path raw = tmp.path / "g.raw";
  save_raw(make_scalar_grid({4, 4}, 0.25), raw);

  auto rewrite_sidecar = [&](nlohmann::json j) {
    std::ofstream out(sidecar_path(raw));
    out << j.dump();
  };
  nlohmann::json good{
      {"dims", {4, 4}}, {"spacing", {1.0, 1.0}}, {"channels", 1}, {"kind", "scalar"}};

  SUBCASE("missing field") {
    nlohmann::json j = good;
    j.erase("dims");
    rewrite_sidecar(j);
    CHECK_THROWS_WITH_AS(load_raw_scalar(raw), doctest::Contains("missing field 'dims'"),
                         std::runtime_error);
  }
  SUBCASE("unknown field") {
    nlohmann::json j = good;
    j["extra"] = 1;
    rewrite_sidecar(j);
    CHECK_THROWS_WITH_AS(load_raw_scalar(raw), doctest::Contains("unknown field 'extra'"),
                         std::runtime_error);
  }
  SUBCASE("wrong kind") {
    CHECK_THROWS_WITH_AS(load_raw_mask(raw), doctest::Contains("expected kind 'mask'"),
                         std::runtime_error);
  }
  SUBCASE("channel count must match the kind") {
    nlohmann::json j = good;
    j["channels"] = 2;
    rewrite_sidecar(j);
    CHECK_THROWS_WITH_AS(load_raw_scalar(raw), doctest::Contains("'channels'"),
                         std::runtime_error);
  }
  SUBCASE("payload size must match dims") {
    nlohmann::json j = good;
    j["dims"] = {4, 5};
    rewrite_sidecar(j);
    CHECK_THROWS_WITH_AS(load_raw_scalar(raw), doctest::Contains("bytes"),
                         std::runtime_error);
  }
  SUBCASE("mask values outside [0,1] are rejected") {
    save_raw(make_scalar_grid({4, 4}, 2.5), raw);
    nlohmann::json j = good;
    j["kind"] = "mask";
    rewrite_sidecar(j);
    CHECK_THROWS_WITH_AS(load_raw_mask(raw), doctest::Contains("outside [0,1]"),
                         std::runtime_error);
  }
}

TEST_CASE("pgm round trip") {
  TempDir tmp;
  MaskGrid m = make_mask_grid({7, 5});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : m.data) v = byte(rng) / 255.0;  // representable at 8 bits
  save_pgm(m, tmp.path / "m.pgm");
  const MaskGrid back = load_pgm_mask(tmp.path / "m.pgm");
  CHECK(back.dims == m.dims);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    CHECK(back.data[i] == doctest::Approx(m.data[i]).epsilon(1e-12));

  SUBCASE("header is the documented P5 form") {
    std::ifstream in(tmp.path / "m.pgm", std::ios::binary);
    std::string magic, w, h, maxval;
    in >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == "7");
    CHECK(h == "5");
    CHECK(maxval == "255");
  }
  SUBCASE("3D grids are rejected") {
    CHECK_THROWS_AS(save_pgm(make_scalar_grid({4, 4, 4}), tmp.path / "x.pgm"),
                    std::invalid_argument);
  }
  SUBCASE("values are clamped then scaled by 255 and rounded") {
    ScalarGrid g = make_scalar_grid({2, 2});
    g.data = {-0.5, 0.251, 0.999, 2.0};
    save_pgm(g, tmp.path / "g.pgm");
    const ScalarGrid back = load_pgm_scalar(tmp.path / "g.pgm");
    CHECK(back.data[0] == 0.0);
    CHECK(back.data[1] == doctest::Approx(64.0 / 255.0));
    CHECK(back.data[2] == 1.0);
    CHECK(back.data[3] == 1.0);
  }
}

TEST_CASE("atomic writes leave no temp files behind") {
  TempDir tmp;
  save_raw(make_scalar_grid({4, 4}, 1.0), tmp.path / "a.raw");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) {
    CHECK(e.path().extension() != ".tmp");
    ++entries;
  }
  CHECK(entries == 2);  // a.raw + a.raw.json
}
