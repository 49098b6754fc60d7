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

#include "tpseg/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "raw grid format is little-endian; big-endian hosts are unsupported");

namespace tpseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kind_name(GridKind k) {
  switch (k) {
    case GridKind::scalar: return "scalar";
    case GridKind::mask: return "mask";
    case GridKind::field: return "field";
  }
  return "scalar";
}

GridKind kind_from_name(const std::string& s, const fs::path& where) {
  if (s == "scalar") return GridKind::scalar;
  if (s == "mask") return GridKind::mask;
  if (s == "field") return GridKind::field;
  throw std::runtime_error("sidecar " + where.string() + ": unknown value for field 'kind': " + s);
}

struct RawHeader {
  Extents dims;
  std::vector<double> spacing;
  int channels = 1;
  GridKind kind = GridKind::scalar;
};

RawHeader read_sidecar(const fs::path& raw_path) {
  const fs::path side = sidecar_path(raw_path);
  json j;
  try {
    j = json::parse(read_file(side));
  } catch (const json::parse_error& e) {
    throw std::runtime_error("sidecar " + side.string() + ": " + e.what());
  }
  for (auto& [key, _] : j.items())
    if (key != "dims" && key != "spacing" && key != "channels" && key != "kind")
      throw std::runtime_error("sidecar " + side.string() + ": unknown field '" + key + "'");
  for (const char* key : {"dims", "spacing", "channels", "kind"})
    if (!j.contains(key))
      throw std::runtime_error("sidecar " + side.string() + ": missing field '" + key + "'");

  RawHeader h;
  try {
    h.dims = j.at("dims").get<Extents>();
    h.spacing = j.at("spacing").get<std::vector<double>>();
    h.channels = j.at("channels").get<int>();
    h.kind = kind_from_name(j.at("kind").get<std::string>(), side);
  } catch (const json::exception& e) {
    throw std::runtime_error("sidecar " + side.string() + ": " + e.what());
  }
  try {
    validate_dims(h.dims);
  } catch (const std::exception& e) {
    throw std::runtime_error("sidecar " + side.string() + ": field 'dims': " + e.what());
  }
  if (h.spacing.size() != h.dims.size())
    throw std::runtime_error("sidecar " + side.string() +
                             ": field 'spacing' length does not match 'dims'");
  const int expected =
      h.kind == GridKind::field ? static_cast<int>(h.dims.size()) : 1;
  if (h.channels != expected)
    throw std::runtime_error("sidecar " + side.string() + ": field 'channels' must be " +
                             std::to_string(expected) + " for kind '" + kind_name(h.kind) + "'");
  return h;
}

std::vector<double> read_raw_values(const fs::path& path, const RawHeader& h) {
  const std::string bytes = read_file(path);
  const std::size_t count = num_nodes(h.dims) * static_cast<std::size_t>(h.channels);
  if (bytes.size() != count * sizeof(float))
    throw std::runtime_error("raw grid " + path.string() + ": expected " +
                             std::to_string(count * sizeof(float)) + " bytes, got " +
                             std::to_string(bytes.size()));
  std::vector<double> values(count);
  const char* p = bytes.data();
  for (std::size_t i = 0; i < count; ++i) {
    float f;
    std::memcpy(&f, p + i * sizeof(float), sizeof(float));
    values[i] = static_cast<double>(f);
  }
  return values;
}

void write_raw(const fs::path& path, const Extents& dims, const std::vector<double>& spacing,
               int channels, GridKind kind, const std::vector<double>& values) {
  std::string bytes(values.size() * sizeof(float), '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::memcpy(bytes.data() + i * sizeof(float), &f, sizeof(float));
  }
  write_file_atomic(path, bytes);

  json j;
  j["dims"] = dims;
  j["spacing"] = spacing;
  j["channels"] = channels;
  j["kind"] = kind_name(kind);
  write_file_atomic(sidecar_path(path), j.dump(2) + "\n");
}

void require_2d(const Extents& dims, const char* who) {
  if (dims.size() != 2) throw std::invalid_argument(std::string(who) + ": grid must be 2D");
}

std::string pgm_bytes(const Extents& dims, const std::vector<double>& data) {
  std::ostringstream out;
  out << "P5\n" << dims[0] << " " << dims[1] << "\n255\n";
  for (double v : data) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  return out.str();
}

std::vector<double> parse_pgm(const fs::path& path, Extents& dims) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };

  if (next_token() != "P5")
    throw std::runtime_error("pgm " + path.string() + ": missing P5 magic");
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255) throw std::runtime_error("pgm " + path.string() + ": maxval must be 255");
  if (w < 2 || h < 2) throw std::runtime_error("pgm " + path.string() + ": extents must be >= 2");
  ++pos;  // single whitespace byte after maxval
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < count)
    throw std::runtime_error("pgm " + path.string() + ": truncated pixel data");
  dims = {w, h};
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i)
    values[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
  return values;
}

}  // namespace

fs::path sidecar_path(const fs::path& raw_path) {
  fs::path p = raw_path;
  p += ".json";
  return p;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_raw(const ScalarGrid& grid, const fs::path& path) {
  write_raw(path, grid.dims, grid.spacing, 1, GridKind::scalar, grid.data);
}

void save_raw(const MaskGrid& grid, const fs::path& path) {
  write_raw(path, grid.dims, grid.spacing, 1, GridKind::mask, grid.data);
}

void save_raw(const DeformationField& field, const fs::path& path) {
  write_raw(path, field.dims, field.spacing, field.channels(), GridKind::field, field.data);
}

GridKind peek_raw_kind(const fs::path& path) { return read_sidecar(path).kind; }

ScalarGrid load_raw_scalar(const fs::path& path) {
  const RawHeader h = read_sidecar(path);
  if (h.kind != GridKind::scalar)
    throw std::runtime_error("raw grid " + path.string() + ": expected kind 'scalar', got '" +
                             kind_name(h.kind) + "'");
  return ScalarGrid{h.dims, h.spacing, read_raw_values(path, h)};
}

MaskGrid load_raw_mask(const fs::path& path) {
  const RawHeader h = read_sidecar(path);
  if (h.kind != GridKind::mask)
    throw std::runtime_error("raw grid " + path.string() + ": expected kind 'mask', got '" +
                             kind_name(h.kind) + "'");
  MaskGrid m{h.dims, h.spacing, read_raw_values(path, h), 0.5};
  for (double v : m.data)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::runtime_error("raw grid " + path.string() + ": mask value outside [0,1]");
  return m;
}

DeformationField load_raw_field(const fs::path& path) {
  const RawHeader h = read_sidecar(path);
  if (h.kind != GridKind::field)
    throw std::runtime_error("raw grid " + path.string() + ": expected kind 'field', got '" +
                             kind_name(h.kind) + "'");
  return DeformationField{h.dims, h.spacing, read_raw_values(path, h)};
}

void save_pgm(const ScalarGrid& grid, const fs::path& path) {
  require_2d(grid.dims, "save_pgm");
  write_file_atomic(path, pgm_bytes(grid.dims, grid.data));
}

void save_pgm(const MaskGrid& grid, const fs::path& path) {
  require_2d(grid.dims, "save_pgm");
  write_file_atomic(path, pgm_bytes(grid.dims, grid.data));
}

ScalarGrid load_pgm_scalar(const fs::path& path) {
  ScalarGrid g;
  g.data = parse_pgm(path, g.dims);
  g.spacing = {1.0, 1.0};
  return g;
}

MaskGrid load_pgm_mask(const fs::path& path) {
  MaskGrid m;
  m.data = parse_pgm(path, m.dims);
  m.spacing = {1.0, 1.0};
  m.threshold = 0.5;
  return m;
}

}  // namespace tpseg
