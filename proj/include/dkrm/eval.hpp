// Copyright 2026 The dkrm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dkrm/records.hpp"

namespace dkrm {

/// One rater's ranking of systems for one context, best first. Each inner
/// list is a group of systems tied at that rank.
struct RankingRecord {
  std::string context_id;
  std::string rater_id;
  std::vector<std::vector<std::string>> ranking;
};

struct WinTieLoss {
  double win = 0.0;
  double tie = 0.0;
  double loss = 0.0;
};

/// Pairwise outcome fractions between every ordered pair of distinct systems.
class WtlMatrix {
 public:
  WtlMatrix(std::vector<std::string> systems, std::vector<WinTieLoss> cells,
            std::size_t record_count);

  std::span<const std::string> systems() const { return systems_; }
  std::size_t record_count() const { return records_; }

  /// Row system versus column system. Throws std::out_of_range for unknown
  /// names or the diagonal.
  const WinTieLoss& at(const std::string& row, const std::string& col) const;
  const WinTieLoss& at(std::size_t row, std::size_t col) const;

  /// Aligned text table in "win/tie/loss" form.
  std::string to_table() const;
  /// "row,col,win,tie,loss"
  std::string to_csv() const;

 private:
  std::vector<std::string> systems_;
  std::vector<WinTieLoss> cells_;  // row-major, diagonal unused
  std::size_t records_;
};

/// Throws DataError when records are empty, a system repeats within a
/// record, or records disagree on the system set.
WtlMatrix pairwise_wtl(std::span<const RankingRecord> records);

/// Fleiss' kappa for a table of category counts (rows = items, columns =
/// categories) with a constant number of raters per item. Returns 1.0 in
/// the degenerate case where every rating falls into one category.
/// Throws DataError on unequal row sums, fewer than 2 raters or categories,
/// negative counts or an empty table.
double fleiss_kappa(const std::vector<std::vector<std::int64_t>>& table);

struct FeatureGap {
  std::vector<double> winner_means;
  std::vector<double> loser_means;

  /// "feature,winner_mean,loser_mean,gap"
  std::string to_csv(const FeatureSchema& schema) const;
  std::string to_table(const FeatureSchema& schema) const;
};

FeatureGap feature_gap_report(std::span<const PreferencePair> dataset);

// Rankings JSONL: {"context_id", "rater_id", "ranking": [[...], [...]]}
std::vector<RankingRecord> load_rankings(const std::filesystem::path& path);
std::string serialize_ranking(const RankingRecord& record);

/// Count table CSV: one item per line, comma-separated non-negative
/// integers. Lines starting with '#' are comments.
std::vector<std::vector<std::int64_t>> load_count_table(const std::filesystem::path& path);

}  // namespace dkrm
