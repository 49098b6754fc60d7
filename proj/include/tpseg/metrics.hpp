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

#ifndef TPSEG_METRICS_HPP
#define TPSEG_METRICS_HPP

#include <string>
#include <vector>

#include "tpseg/grid.hpp"

namespace tpseg {

/// 2|A∩B| / (|A|+|B|) on binary masks; 1 when both are empty.
double dice_score(const MaskGrid& a, const MaskGrid& b);

/// |A∩B| / |A∪B| on binary masks; 1 when both are empty.
double iou_score(const MaskGrid& a, const MaskGrid& b);

struct ScoreRow {
  std::string case_id;
  double dice = 0.0;
  double iou = 0.0;
  bool topology_ok = false;
};

struct ScoreAggregate {
  double mean = 0.0;
  double stderr_mean = 0.0;  // standard error of the mean; 0 for a single row
  double stddev = 0.0;       // sample standard deviation
  double best = 0.0;         // max over rows
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  ScoreAggregate dice;
  ScoreAggregate iou;
  int topology_ok_count = 0;
};

/// Aggregates per-case rows; throws on empty input.
ScoreTable aggregate(std::vector<ScoreRow> rows);

/// One line per case: "case,dice,iou,topology_ok".
std::string to_csv(const ScoreTable& table);

/// Human-readable summary with scores in percent, two decimals,
/// "mean ± stderr" and a Best column.
std::string format_table(const ScoreTable& table);

}  // namespace tpseg

#endif  // TPSEG_METRICS_HPP
