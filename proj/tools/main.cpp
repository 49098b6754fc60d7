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

// tpseg command line: synthesize fixtures, segment by template deformation,
// corrupt volumes, certify topology, and score predictions.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 topology certification
// failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpseg/grid_io.hpp"
#include "tpseg/metrics.hpp"
#include "tpseg/solver.hpp"
#include "tpseg/synth.hpp"
#include "tpseg/topology.hpp"
#include "tpseg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tpseg;

namespace {

bool is_pgm(const fs::path& p) { return p.extension() == ".pgm"; }

ScalarGrid load_image(const fs::path& p) {
  return is_pgm(p) ? load_pgm_scalar(p) : load_raw_scalar(p);
}

MaskGrid load_mask_any(const fs::path& p) {
  return is_pgm(p) ? load_pgm_mask(p) : load_raw_mask(p);
}

Extents parse_dims(const std::string& text) {
  Extents dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) dims.push_back(std::stoi(part));
  validate_dims(dims);
  return dims;
}

std::vector<double> parse_offset(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
  return out;
}

// inclusive slice range "a..b"; a > b is the explicit empty range
std::pair<int, int> parse_slice_range(const std::string& text) {
  const std::size_t sep = text.find("..");
  if (sep == std::string::npos)
    throw std::invalid_argument("--slices expects the form a..b, got '" + text + "'");
  return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 2))};
}

void write_manifest(const fs::path& out_dir, json manifest) {
  manifest["version"] = kVersion;
  manifest["out_dir"] = out_dir.string();
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

MaskGrid boundary_of(const MaskGrid& mask) {
  MaskGrid edge = mask;
  const int nx = mask.dims[0], ny = mask.dims[1];
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      if (mask.at(x, y) != 1.0) {
        edge.data[edge.index(x, y)] = 0.0;
        continue;
      }
      const bool interior = x > 0 && x < nx - 1 && y > 0 && y < ny - 1 &&
                            mask.at(x - 1, y) == 1.0 && mask.at(x + 1, y) == 1.0 &&
                            mask.at(x, y - 1) == 1.0 && mask.at(x, y + 1) == 1.0;
      edge.data[edge.index(x, y)] = interior ? 0.0 : 1.0;
    }
  return edge;
}

int cmd_segment(const fs::path& image_path, const fs::path& tmpl_path,
                const std::optional<fs::path>& target_path,
                const std::optional<fs::path>& config_path, int levels,
                const SolveConfig& config, const fs::path& out_dir) {
  const ScalarGrid image = normalize_intensity(load_image(image_path));
  const MaskGrid tmpl = load_mask_any(tmpl_path);
  std::optional<MaskGrid> provided;
  if (target_path) provided = load_mask_any(*target_path);

  const MaskGrid target =
      provided ? derive_target_mask(image, TargetMethod::provided, &*provided)
               : derive_target_mask(image, TargetMethod::otsu_threshold);

  fs::create_directories(out_dir);
  json manifest{{"command", "segment"},
                {"inputs",
                 {{"image", image_path.string()},
                  {"template", tmpl_path.string()},
                  {"target", target_path ? json(target_path->string()) : json(nullptr)},
                  {"config", config_path ? json(config_path->string()) : json(nullptr)}}},
                {"config", config},
                {"levels", levels},
                {"seed", config.seed}};
  write_manifest(out_dir, manifest);

  const SolveResult result = solve_multilevel(image, tmpl, target, levels, config);

  save_raw(result.mask, out_dir / "mask.raw");
  save_raw(result.soft_mask, out_dir / "soft_mask.raw");
  save_raw(result.field, out_dir / "field.raw");
  save_raw(to_scalar_grid(jacobian_determinant(result.field)), out_dir / "jacobian.raw");
  write_file_atomic(out_dir / "loss_history.csv", loss_history_csv(result.loss_history));
  const json report = result.topology;
  write_file_atomic(out_dir / "topology.json", report.dump(2) + "\n");

  if (image.ndim() == 2) {
    save_pgm(result.mask, out_dir / "mask.pgm");
    // visual-inspection overlay: the image with the mask boundary burned in
    ScalarGrid overlay = image;
    const MaskGrid edge = boundary_of(result.mask);
    for (std::size_t i = 0; i < overlay.data.size(); ++i)
      if (edge.data[i] == 1.0) overlay.data[i] = 1.0;
    save_pgm(overlay, out_dir / "overlay.pgm");
  }

  std::cout << report.dump(2) << "\n";
  return result.topology.matches_template ? 0 : 2;
}

int cmd_synth(const std::string& shape_name_str, const std::string& dims_str, double noise_sd,
              std::uint64_t seed, double template_frac, const std::string& offset_str,
              const fs::path& out_dir) {
  SynthConfig sc;
  sc.shape = shape_from_name(shape_name_str);
  sc.dims = parse_dims(dims_str);
  sc.noise_sd = noise_sd;
  sc.seed = seed;
  sc.template_frac = template_frac;
  if (!offset_str.empty()) sc.template_offset = parse_offset(offset_str);

  const SynthCase c = make_synth_case(sc);

  fs::create_directories(out_dir);
  json manifest{{"command", "synth"},
                {"inputs", json::object()},
                {"params",
                 {{"shape", shape_name(sc.shape)},
                  {"dims", sc.dims},
                  {"noise_sd", sc.noise_sd},
                  {"template_frac", sc.template_frac},
                  {"template_offset", sc.template_offset}}},
                {"seed", seed}};
  write_manifest(out_dir, manifest);

  save_raw(c.image, out_dir / "image.raw");
  save_raw(c.label, out_dir / "label.raw");
  save_raw(c.template_mask, out_dir / "template.raw");
  if (sc.dims.size() == 2) {
    save_pgm(c.image, out_dir / "image.pgm");
    save_pgm(c.label, out_dir / "label.pgm");
    save_pgm(c.template_mask, out_dir / "template.pgm");
  }
  return 0;
}

int cmd_corrupt(const fs::path& image_path, const std::string& slices,
                const fs::path& out_path) {
  const ScalarGrid image = load_raw_scalar(image_path);
  const auto [lo, hi] = parse_slice_range(slices);
  save_raw(corrupt_slices(image, lo, hi), out_path);
  return 0;
}

int cmd_topo_check(const fs::path& mask_path, const fs::path& tmpl_path) {
  const MaskGrid mask = binarize(load_mask_any(mask_path));
  const MaskGrid tmpl = binarize(load_mask_any(tmpl_path));
  const TopologyReport report = certify(mask, tmpl);
  const json j = report;
  std::cout << j.dump(2) << "\n";
  return report.matches_template ? 0 : 2;
}

std::set<std::string> mask_cases_in(const fs::path& dir) {
  std::set<std::string> cases;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".raw") continue;
    if (!fs::exists(sidecar_path(entry.path()))) continue;
    if (peek_raw_kind(entry.path()) != GridKind::mask) continue;
    cases.insert(entry.path().stem().string());
  }
  return cases;
}

int cmd_score(const fs::path& pred_dir, const fs::path& label_dir, bool apply_cca,
              const fs::path& out_dir) {
  const std::set<std::string> pred_cases = mask_cases_in(pred_dir);
  const std::set<std::string> label_cases = mask_cases_in(label_dir);
  if (pred_cases.empty()) throw std::runtime_error("no mask cases in " + pred_dir.string());
  if (pred_cases != label_cases) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(pred_cases.begin(), pred_cases.end(), label_cases.begin(),
                                  label_cases.end(), std::back_inserter(diff));
    std::string msg = "case sets differ between directories:";
    for (const auto& d : diff) msg += " " + d;
    throw std::runtime_error(msg);
  }

  std::vector<ScoreRow> rows;
  for (const std::string& case_id : pred_cases) {
    MaskGrid pred = binarize(load_raw_mask(pred_dir / (case_id + ".raw")));
    const MaskGrid label = binarize(load_raw_mask(label_dir / (case_id + ".raw")));
    if (apply_cca) pred = cca_postprocess(pred);
    ScoreRow row;
    row.case_id = case_id;
    row.dice = dice_score(pred, label);
    row.iou = iou_score(pred, label);
    row.topology_ok = certify(pred, label).matches_template;
    rows.push_back(std::move(row));
  }

  const ScoreTable table = aggregate(std::move(rows));
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "scores.csv", to_csv(table));
  write_file_atomic(out_dir / "scores.txt", format_table(table));
  std::cout << format_table(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-preserving segmentation by deformable template masks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* segment = app.add_subcommand(
      "segment", "Optimize a deformation of the template mask that segments the image");
  std::string seg_image, seg_template, seg_target, seg_config, seg_out;
  int seg_levels = 3;
  SolveConfig seg_cfg;
  segment->add_option("--image", seg_image, "Input image (.raw or .pgm)")->required();
  segment->add_option("--template", seg_template, "Template mask encoding the topology prior")
      ->required();
  segment->add_option("--target", seg_target,
                      "Fidelity target mask; Otsu thresholding of the image when omitted");
  segment->add_option("--config", seg_config, "SolveConfig JSON file");
  segment->add_option("--levels", seg_levels, "Coarse-to-fine levels (1 = single level)")
      ->check(CLI::PositiveNumber);
  segment->add_option("--out", seg_out, "Output directory")->required();
  auto* seg_seed =
      segment->add_option("--seed", seg_cfg.seed, "Seed recorded in the manifest");
  auto* seg_iters = segment->add_option("--max-iters", seg_cfg.max_iters, "Iteration cap");
  auto* seg_step = segment->add_option("--step-size", seg_cfg.step_size, "Optimizer step");
  std::string seg_optimizer;
  auto* seg_opt =
      segment->add_option("--optimizer", seg_optimizer, "gradient-descent or adaptive-moment");
  auto* seg_tol =
      segment->add_option("--tol", seg_cfg.convergence_tol, "Relative loss-change stop");
  auto* seg_ld = segment->add_option("--lambda-dice", seg_cfg.loss.lambda_dice, "Dice weight");
  auto* seg_lj =
      segment->add_option("--lambda-jac", seg_cfg.loss.lambda_jac, "Jacobian margin weight");
  auto* seg_ll =
      segment->add_option("--lambda-lap", seg_cfg.loss.lambda_lap, "Laplacian weight");
  auto* seg_eps = segment->add_option("--epsilon", seg_cfg.loss.epsilon, "Jacobian margin");
  auto* seg_smooth =
      segment->add_option("--dice-smoothing", seg_cfg.loss.dice_smoothing, "Dice smoothing");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic image/label/template case");
  std::string sy_shape, sy_dims, sy_offset, sy_out;
  double sy_noise = 0.0, sy_frac = 0.6;
  std::uint64_t sy_seed = 0;
  synth->add_option("--shape", sy_shape, "disk, ball, star or two-blobs")->required();
  synth->add_option("--dims", sy_dims, "Extents, e.g. 64x64 or 32x32x32")->required();
  synth->add_option("--noise", sy_noise, "Additive Gaussian noise sigma");
  synth->add_option("--seed", sy_seed, "Noise / geometry seed");
  synth->add_option("--template-frac", sy_frac,
                    "Template radius as a fraction of the label's equivalent radius");
  synth->add_option("--template-offset", sy_offset, "Template center offset, e.g. 6,4");
  synth->add_option("--out", sy_out, "Output directory")->required();

  auto* corrupt = app.add_subcommand("corrupt", "Zero a range of depth slices of a 3D image");
  std::string co_image, co_slices, co_out;
  corrupt->add_option("--image", co_image, "Input 3D image (.raw)")->required();
  corrupt->add_option("--slices", co_slices, "Inclusive slice range a..b along the last axis")
      ->required();
  corrupt->add_option("--out", co_out, "Output image path")->required();

  auto* topo =
      app.add_subcommand("topo-check", "Certify a mask against a template's topology");
  std::string tc_mask, tc_template;
  topo->add_option("--mask", tc_mask, "Mask to certify")->required();
  topo->add_option("--template", tc_template, "Template mask")->required();

  auto* score = app.add_subcommand("score", "Score predicted masks against labels");
  std::string s_pred, s_label, s_out = ".";
  bool s_cca = false;
  score->add_option("--pred", s_pred, "Directory of predicted masks (<case>.raw)")->required();
  score->add_option("--label", s_label, "Directory of label masks (<case>.raw)")->required();
  score->add_flag("--cca", s_cca, "Keep only the largest component before scoring");
  score->add_option("--out", s_out, "Directory for scores.csv / scores.txt");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*segment) {
      SolveConfig cfg;
      if (!seg_config.empty()) {
        std::ifstream in(seg_config);
        if (!in) throw std::runtime_error("cannot open config " + seg_config);
        cfg = json::parse(in).get<SolveConfig>();
      }
      // long-form flags override the config file, which overrides defaults
      if (*seg_seed) cfg.seed = seg_cfg.seed;
      if (*seg_iters) cfg.max_iters = seg_cfg.max_iters;
      if (*seg_step) cfg.step_size = seg_cfg.step_size;
      if (*seg_opt) {
        if (seg_optimizer == "gradient-descent")
          cfg.optimizer = Optimizer::gradient_descent;
        else if (seg_optimizer == "adaptive-moment")
          cfg.optimizer = Optimizer::adaptive_moment;
        else
          throw std::runtime_error("unknown optimizer '" + seg_optimizer + "'");
      }
      if (*seg_tol) cfg.convergence_tol = seg_cfg.convergence_tol;
      if (*seg_ld) cfg.loss.lambda_dice = seg_cfg.loss.lambda_dice;
      if (*seg_lj) cfg.loss.lambda_jac = seg_cfg.loss.lambda_jac;
      if (*seg_ll) cfg.loss.lambda_lap = seg_cfg.loss.lambda_lap;
      if (*seg_eps) cfg.loss.epsilon = seg_cfg.loss.epsilon;
      if (*seg_smooth) cfg.loss.dice_smoothing = seg_cfg.loss.dice_smoothing;
      validate(cfg);
      return cmd_segment(
          seg_image, seg_template,
          seg_target.empty() ? std::nullopt : std::optional<fs::path>(seg_target),
          seg_config.empty() ? std::nullopt : std::optional<fs::path>(seg_config), seg_levels,
          cfg, seg_out);
    }
    if (*synth)
      return cmd_synth(sy_shape, sy_dims, sy_noise, sy_seed, sy_frac, sy_offset, sy_out);
    if (*corrupt) return cmd_corrupt(co_image, co_slices, co_out);
    if (*topo) return cmd_topo_check(tc_mask, tc_template);
    if (*score) return cmd_score(s_pred, s_label, s_cca, s_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
