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

#include "dkrm/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dkrm/error.hpp"

namespace dkrm {

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

WtlMatrix::WtlMatrix(std::vector<std::string> systems, std::vector<WinTieLoss> cells,
                     std::size_t record_count)
    : systems_(std::move(systems)), cells_(std::move(cells)), records_(record_count) {
  if (cells_.size() != systems_.size() * systems_.size()) {
    throw std::invalid_argument("wtl cell count does not match system count");
  }
}

const WinTieLoss& WtlMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= systems_.size() || col >= systems_.size() || row == col) {
    throw std::out_of_range("wtl cell out of range");
  }
  return cells_[row * systems_.size() + col];
}

const WinTieLoss& WtlMatrix::at(const std::string& row, const std::string& col) const {
  auto find = [&](const std::string& s) {
    auto it = std::find(systems_.begin(), systems_.end(), s);
    if (it == systems_.end()) throw std::out_of_range("unknown system: " + s);
    return static_cast<std::size_t>(it - systems_.begin());
  };
  return at(find(row), find(col));
}

std::string WtlMatrix::to_table() const {
  std::size_t w = 6;
  for (const auto& s : systems_) w = std::max(w, s.size());
  const std::size_t cell_w = std::max<std::size_t>(w, 17);
  std::ostringstream os;
  os << pad("", w);
  for (const auto& s : systems_) os << "  " << pad(s, cell_w);
  os << '\n';
  for (std::size_t r = 0; r < systems_.size(); ++r) {
    os << pad(systems_[r], w);
    for (std::size_t c = 0; c < systems_.size(); ++c) {
      std::string cell = "-";
      if (r != c) {
        const auto& x = at(r, c);
        cell = fmt3(x.win) + "/" + fmt3(x.tie) + "/" + fmt3(x.loss);
      }
      os << "  " << pad(cell, cell_w);
    }
    os << '\n';
  }
  return os.str();
}

std::string WtlMatrix::to_csv() const {
  std::ostringstream os;
  os << "row,col,win,tie,loss\n";
  for (std::size_t r = 0; r < systems_.size(); ++r) {
    for (std::size_t c = 0; c < systems_.size(); ++c) {
      if (r == c) continue;
      const auto& x = at(r, c);
      os << systems_[r] << ',' << systems_[c] << ',' << fmt_full(x.win) << ','
         << fmt_full(x.tie) << ',' << fmt_full(x.loss) << '\n';
    }
  }
  return os.str();
}

WtlMatrix pairwise_wtl(std::span<const RankingRecord> records) {
  if (records.empty()) throw DataError("no ranking records");

  // Rank position per system, per record.
  std::vector<std::map<std::string, std::size_t>> ranks;
  ranks.reserve(records.size());
  std::set<std::string> reference;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t g = 0; g < records[i].ranking.size(); ++g) {
      for (const auto& s : records[i].ranking[g]) {
        if (!pos.emplace(s, g).second) {
          throw DataError("record " + std::to_string(i) + ": system listed twice: " + s);
        }
      }
    }
    std::set<std::string> names;
    for (const auto& [s, g] : pos) names.insert(s);
    if (i == 0) {
      if (names.size() < 2) throw DataError("record 0: fewer than 2 systems");
      reference = std::move(names);
    } else if (names != reference) {
      throw DataError("record " + std::to_string(i) + ": inconsistent system set");
    }
    ranks.push_back(std::move(pos));
  }

  std::vector<std::string> systems(reference.begin(), reference.end());
  const std::size_t k = systems.size();
  std::vector<std::size_t> win(k * k, 0), tie(k * k, 0);
  for (const auto& pos : ranks) {
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t ra = pos.at(systems[a]);
      for (std::size_t b = 0; b < k; ++b) {
        if (a == b) continue;
        const std::size_t rb = pos.at(systems[b]);
        if (ra < rb) ++win[a * k + b];
        else if (ra == rb) ++tie[a * k + b];
      }
    }
  }
  const double n = static_cast<double>(records.size());
  std::vector<WinTieLoss> cells(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const std::size_t w = win[a * k + b], t = tie[a * k + b];
      const std::size_t l = records.size() - w - t;
      cells[a * k + b] = {static_cast<double>(w) / n, static_cast<double>(t) / n,
                          static_cast<double>(l) / n};
    }
  }
  return WtlMatrix(std::move(systems), std::move(cells), records.size());
}

double fleiss_kappa(const std::vector<std::vector<std::int64_t>>& table) {
  if (table.empty()) throw DataError("kappa: empty table");
  const std::size_t cats = table.front().size();
  if (cats < 2) throw DataError("kappa: need at least 2 categories");
  std::int64_t raters = -1;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.size() != cats) {
      throw DataError("kappa: row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                      " categories, expected " + std::to_string(cats));
    }
    std::int64_t sum = 0;
    for (auto c : row) {
      if (c < 0) throw DataError("kappa: negative count in row " + std::to_string(i));
      sum += c;
    }
    if (raters < 0) raters = sum;
    else if (sum != raters) {
      throw DataError("kappa: unequal row sums (row " + std::to_string(i) + " sums to " +
                      std::to_string(sum) + ", expected " + std::to_string(raters) + ")");
    }
  }
  if (raters < 2) throw DataError("kappa: need at least 2 raters per item");

  const double n = static_cast<double>(raters);
  const double items = static_cast<double>(table.size());
  std::vector<double> col(cats, 0.0);
  double p_bar = 0.0;
  for (const auto& row : table) {
    double sq = 0.0;
    for (std::size_t j = 0; j < cats; ++j) {
      const double c = static_cast<double>(row[j]);
      sq += c * c;
      col[j] += c;
    }
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  p_bar /= items;
  double p_e = 0.0;
  for (double c : col) {
    const double p = c / (items * n);
    p_e += p * p;
  }
  if (p_e >= 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

FeatureGap feature_gap_report(std::span<const PreferencePair> dataset) {
  if (dataset.empty()) throw DataError("empty dataset");
  const std::size_t d = dataset.front().winner_features.size();
  FeatureGap gap;
  gap.winner_means.assign(d, 0.0);
  gap.loser_means.assign(d, 0.0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& p = dataset[i];
    if (p.winner_features.size() != d || p.loser_features.size() != d) {
      throw DataError("pair " + std::to_string(i) + ": feature length mismatch");
    }
    for (std::size_t j = 0; j < d; ++j) {
      gap.winner_means[j] += p.winner_features.values[j];
      gap.loser_means[j] += p.loser_features.values[j];
    }
  }
  const double n = static_cast<double>(dataset.size());
  for (std::size_t j = 0; j < d; ++j) {
    gap.winner_means[j] /= n;
    gap.loser_means[j] /= n;
  }
  return gap;
}

std::string FeatureGap::to_csv(const FeatureSchema& schema) const {
  if (schema.size() != winner_means.size()) throw DataError("feature gap: schema size mismatch");
  std::ostringstream os;
  os << "feature,winner_mean,loser_mean,gap\n";
  for (std::size_t j = 0; j < winner_means.size(); ++j) {
    os << schema[j].name << ',' << fmt_full(winner_means[j]) << ',' << fmt_full(loser_means[j])
       << ',' << fmt_full(winner_means[j] - loser_means[j]) << '\n';
  }
  return os.str();
}

std::string FeatureGap::to_table(const FeatureSchema& schema) const {
  if (schema.size() != winner_means.size()) throw DataError("feature gap: schema size mismatch");
  std::size_t w = 7;
  for (const auto& f : schema.features()) w = std::max(w, f.name.size());
  std::ostringstream os;
  os << pad("feature", w) << "  winner  loser   gap\n";
  for (std::size_t j = 0; j < winner_means.size(); ++j) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  %6.3f  %6.3f  %+6.3f", winner_means[j], loser_means[j],
                  winner_means[j] - loser_means[j]);
    os << pad(schema[j].name, w) << buf << '\n';
  }
  return os.str();
}

std::vector<RankingRecord> load_rankings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path.string());
  std::vector<RankingRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      RankingRecord r;
      r.context_id = j.at("context_id").get<std::string>();
      r.rater_id = j.at("rater_id").get<std::string>();
      for (const auto& group : j.at("ranking")) {
        if (group.is_string()) {
          r.ranking.push_back({group.get<std::string>()});
        } else {
          r.ranking.push_back(group.get<std::vector<std::string>>());
        }
        if (r.ranking.back().empty()) throw DataError("empty rank group");
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  if (out.empty()) throw DataError(path.string() + ": empty dataset");
  return out;
}

std::string serialize_ranking(const RankingRecord& record) {
  nlohmann::ordered_json j;
  j["context_id"] = record.context_id;
  j["rater_id"] = record.rater_id;
  j["ranking"] = record.ranking;
  return j.dump();
}

std::vector<std::vector<std::int64_t>> load_count_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("file not found: " + path.string());
  std::vector<std::vector<std::int64_t>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::int64_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": not an integer: '" +
                        cell + "'");
      }
      row.push_back(v);
    }
    table.push_back(std::move(row));
  }
  if (table.empty()) throw DataError(path.string() + ": empty table");
  return table;
}

}  // namespace dkrm
