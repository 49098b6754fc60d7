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

#include "tpseg/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tpseg {

namespace {

void overlap_counts(const MaskGrid& a, const MaskGrid& b, const char* who,
                    std::size_t& na, std::size_t& nb, std::size_t& inter) {
  if (a.dims != b.dims) throw std::invalid_argument(std::string(who) + ": mask dims differ");
  if (!is_binary(a) || !is_binary(b))
    throw std::invalid_argument(std::string(who) + ": masks must be binary");
  na = nb = inter = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool fa = a.data[i] == 1.0;
    const bool fb = b.data[i] == 1.0;
    na += fa;
    nb += fb;
    inter += fa && fb;
  }
}

ScoreAggregate aggregate_metric(const std::vector<ScoreRow>& rows, double ScoreRow::*field) {
  ScoreAggregate agg;
  const double n = static_cast<double>(rows.size());
  double sum = 0.0;
  agg.best = rows.front().*field;
  for (const ScoreRow& r : rows) {
    sum += r.*field;
    if (r.*field > agg.best) agg.best = r.*field;
  }
  agg.mean = sum / n;
  if (rows.size() > 1) {
    double ss = 0.0;
    for (const ScoreRow& r : rows) {
      const double d = r.*field - agg.mean;
      ss += d * d;
    }
    agg.stddev = std::sqrt(ss / (n - 1.0));
    agg.stderr_mean = agg.stddev / std::sqrt(n);
  }
  return agg;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

}  // namespace

double dice_score(const MaskGrid& a, const MaskGrid& b) {
  std::size_t na, nb, inter;
  overlap_counts(a, b, "dice_score", na, nb, inter);
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

double iou_score(const MaskGrid& a, const MaskGrid& b) {
  std::size_t na, nb, inter;
  overlap_counts(a, b, "iou_score", na, nb, inter);
  const std::size_t uni = na + nb - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

ScoreTable aggregate(std::vector<ScoreRow> rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: no rows");
  ScoreTable table;
  table.rows = std::move(rows);
  table.dice = aggregate_metric(table.rows, &ScoreRow::dice);
  table.iou = aggregate_metric(table.rows, &ScoreRow::iou);
  for (const ScoreRow& r : table.rows)
    if (r.topology_ok) ++table.topology_ok_count;
  return table;
}

std::string to_csv(const ScoreTable& table) {
  std::ostringstream out;
  out << "case,dice,iou,topology_ok\n";
  out.precision(17);
  for (const ScoreRow& r : table.rows)
    out << r.case_id << "," << r.dice << "," << r.iou << "," << (r.topology_ok ? 1 : 0)
        << "\n";
  return out.str();
}

std::string format_table(const ScoreTable& table) {
  std::ostringstream out;
  out << "cases: " << table.rows.size() << "\n";
  out << "Metric      Mean +/- StdErr     (StdDev)    Best\n";
  out << "Dice (%)    " << pct(table.dice.mean) << " +/- " << pct(table.dice.stderr_mean)
      << "      (" << pct(table.dice.stddev) << ")      " << pct(table.dice.best) << "\n";
  out << "IoU  (%)    " << pct(table.iou.mean) << " +/- " << pct(table.iou.stderr_mean)
      << "      (" << pct(table.iou.stddev) << ")      " << pct(table.iou.best) << "\n";
  out << "topology ok: " << table.topology_ok_count << "/" << table.rows.size() << "\n";
  return out.str();
}

}  // namespace tpseg
