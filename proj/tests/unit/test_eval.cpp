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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"
#include "dkrm/eval.hpp"
#include "dkrm/synth.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

RankingRecord rec(std::vector<std::vector<std::string>> ranking) {
  static int n = 0;
  return {"c" + std::to_string(n++), "r", std::move(ranking)};
}

TEST(PairwiseWtl, AlwaysAbove) {
  std::vector<RankingRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec({{"A"}, {"B"}}));
  const auto m = pairwise_wtl(rs);
  EXPECT_EQ(m.at("A", "B").win, 1.0);
  EXPECT_EQ(m.at("A", "B").tie, 0.0);
  EXPECT_EQ(m.at("A", "B").loss, 0.0);
  EXPECT_EQ(m.at("B", "A").loss, 1.0);
  EXPECT_EQ(m.record_count(), 10u);
  EXPECT_THROW(m.at("A", "A"), std::out_of_range);
  EXPECT_THROW(m.at("A", "Z"), std::out_of_range);
}

TEST(PairwiseWtl, ThirtySecondsGranularity) {
  std::vector<RankingRecord> rs;
  for (int i = 0; i < 18; ++i) rs.push_back(rec({{"A"}, {"B"}}));
  for (int i = 0; i < 2; ++i) rs.push_back(rec({{"A", "B"}}));
  for (int i = 0; i < 12; ++i) rs.push_back(rec({{"B"}, {"A"}}));
  const auto& c = pairwise_wtl(rs).at("A", "B");
  EXPECT_EQ(c.win, 0.5625);
  EXPECT_EQ(c.tie, 0.0625);
  EXPECT_EQ(c.loss, 0.375);
}

TEST(PairwiseWtl, Errors) {
  EXPECT_THROW(pairwise_wtl({}), DataError);
  std::vector<RankingRecord> dup{rec({{"A"}, {"A", "B"}})};
  EXPECT_THROW(pairwise_wtl(dup), DataError);
  std::vector<RankingRecord> mixed{rec({{"A"}, {"B"}}), rec({{"A"}, {"C"}})};
  EXPECT_THROW(pairwise_wtl(mixed), DataError);
  std::vector<RankingRecord> single{rec({{"A"}})};
  EXPECT_THROW(pairwise_wtl(single), DataError);
}

std::vector<RankingRecord> random_rankings(Rng& rng, std::size_t systems, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < systems; ++i) names.push_back("S" + std::to_string(i));
  std::vector<RankingRecord> out;
  for (std::size_t r = 0; r < n; ++r) {
    auto order = names;
    rng.shuffle(std::span<std::string>(order));
    RankingRecord record{"c" + std::to_string(r), "r" + std::to_string(rng.below(3)), {}};
    for (const auto& s : order) {
      if (record.ranking.empty() || rng.below(3) != 0) record.ranking.emplace_back();
      record.ranking.back().push_back(s);
    }
    out.push_back(std::move(record));
  }
  return out;
}

// Property: (X, Y) = (w, t, l) implies (Y, X) = (l, t, w); rows sum to one.
TEST(PairwiseWtl, AntisymmetryFuzz) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto rs = random_rankings(rng, 2 + rng.below(5), 1 + rng.below(20));
    const auto m = pairwise_wtl(rs);
    const std::size_t k = m.systems().size();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        const auto& a = m.at(i, j);
        const auto& b = m.at(j, i);
        EXPECT_EQ(a.win, b.loss);
        EXPECT_EQ(a.tie, b.tie);
        EXPECT_EQ(a.loss, b.win);
        EXPECT_NEAR(a.win + a.tie + a.loss, 1.0, 1e-9);
      }
    }
  }
}

TEST(PairwiseWtl, TableAndCsv) {
  std::vector<RankingRecord> rs{rec({{"B"}, {"A"}}), rec({{"A"}, {"B"}})};
  const auto m = pairwise_wtl(rs);
  EXPECT_EQ(m.systems()[0], "A");
  EXPECT_NE(m.to_table().find("0.500/0.000/0.500"), std::string::npos);
  const auto csv = m.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "row,col,win,tie,loss");
  EXPECT_NE(csv.find("A,B,0.5,0,0.5"), std::string::npos) << csv;
}

TEST(Rankings, JsonlRoundTrip) {
  testing::TempDir dir;
  Rng rng(1);
  const auto rs = random_rankings(rng, 4, 6);
  std::string text;
  for (const auto& r : rs) text += serialize_ranking(r) + "\n";
  write_text_file(dir / "r.jsonl", text);
  const auto back = load_rankings(dir / "r.jsonl");
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(back[i].context_id, rs[i].context_id);
    EXPECT_EQ(back[i].rater_id, rs[i].rater_id);
    EXPECT_EQ(back[i].ranking, rs[i].ranking);
  }
  write_text_file(dir / "s.jsonl", R"({"context_id":"c","rater_id":"r","ranking":["A",["B","C"]]})"
                                   "\n");
  const auto bare = load_rankings(dir / "s.jsonl");
  EXPECT_EQ(bare[0].ranking, (std::vector<std::vector<std::string>>{{"A"}, {"B", "C"}}));
}

// --- Fleiss' kappa --------------------------------------------------------------

TEST(FleissKappa, PerfectAgreement) {
  EXPECT_EQ(fleiss_kappa({{5, 0, 0}, {0, 5, 0}, {0, 0, 5}, {5, 0, 0}}), 1.0);
  // Every rating in one category: degenerate, reported as full agreement.
  EXPECT_EQ(fleiss_kappa({{4, 0}, {4, 0}}), 1.0);
}

TEST(FleissKappa, ChanceLevelIsZero) {
  // Pbar = 0.5 and uniform margins give Pe = 0.5.
  EXPECT_NEAR(fleiss_kappa({{3, 1}, {1, 3}}), 0.0, 1e-15);
}

TEST(FleissKappa, HandWorkedTenItemExample) {
  // Worked by hand: Pbar = 3/5, Pe = 421/1250, so kappa = 329/829.
  const std::vector<std::vector<std::int64_t>> t{{5, 0, 0}, {4, 1, 0}, {3, 2, 0}, {0, 5, 0},
                                                 {1, 3, 1}, {0, 1, 4}, {2, 2, 1}, {0, 0, 5},
                                                 {1, 0, 4}, {3, 1, 1}};
  EXPECT_NEAR(fleiss_kappa(t), 329.0 / 829.0, 1e-6);
  EXPECT_NEAR(fleiss_kappa(t), 0.3968636911942099, 1e-12);
}

TEST(FleissKappa, Errors) {
  EXPECT_THROW(fleiss_kappa({}), DataError);
  EXPECT_THROW(fleiss_kappa({{3}, {3}}), DataError);
  EXPECT_THROW(fleiss_kappa({{3, 0}, {2, 0}}), DataError);
  EXPECT_THROW(fleiss_kappa({{1, 0}, {0, 1}}), DataError);
  EXPECT_THROW(fleiss_kappa({{3, -1}, {1, 1}}), DataError);
  EXPECT_THROW(fleiss_kappa({{3, 0, 0}, {3, 0}}), DataError);
}

// Property: kappa ignores category labels and item order.
TEST(FleissKappa, InvariantUnderRelabelingAndItemPermutation) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t items = 2 + rng.below(15), cats = 2 + rng.below(4);
    const std::int64_t raters = 2 + static_cast<std::int64_t>(rng.below(8));
    std::vector<std::vector<std::int64_t>> t(items, std::vector<std::int64_t>(cats, 0));
    for (auto& row : t) {
      for (std::int64_t r = 0; r < raters; ++r) ++row[rng.below(cats)];
    }
    const double base = fleiss_kappa(t);
    std::vector<std::size_t> perm(cats);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    auto relabeled = t;
    for (std::size_t i = 0; i < items; ++i) {
      for (std::size_t j = 0; j < cats; ++j) relabeled[i][perm[j]] = t[i][j];
    }
    rng.shuffle(std::span<std::vector<std::int64_t>>(relabeled));
    EXPECT_NEAR(fleiss_kappa(relabeled), base, 1e-12);
  }
}

TEST(CountTable, LoadsWithComments) {
  testing::TempDir dir;
  write_text_file(dir / "t.csv", "# items x categories\n5,0\n2, 3\n\n");
  EXPECT_EQ(load_count_table(dir / "t.csv"),
            (std::vector<std::vector<std::int64_t>>{{5, 0}, {2, 3}}));
  write_text_file(dir / "bad.csv", "5,x\n");
  EXPECT_THROW(load_count_table(dir / "bad.csv"), DataError);
}

// --- feature gap ----------------------------------------------------------------

PreferencePair pair_of(FeatureVector w, FeatureVector l) {
  PreferencePair p;
  p.context_id = "c";
  p.winner.candidate_id = "w";
  p.loser.candidate_id = "l";
  p.winner_features = std::move(w);
  p.loser_features = std::move(l);
  return p;
}

TEST(FeatureGap, SinglePairEqualsVectors) {
  const std::vector<PreferencePair> one{
      pair_of({1, 2, 3, 4, 5, 0, 1}, {0, 1, 2, 3, 4, 5, 0})};
  const auto g = feature_gap_report(one);
  EXPECT_EQ(g.winner_means, one[0].winner_features.values);
  EXPECT_EQ(g.loser_means, one[0].loser_features.values);
  const auto csv = g.to_csv(default_schema());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "feature,winner_mean,loser_mean,gap");
  EXPECT_NE(g.to_table(default_schema()).find("hallucination"), std::string::npos);
  EXPECT_THROW(feature_gap_report({}), DataError);
}

TEST(FeatureGap, DominatingWinners) {
  Rng rng(5);
  std::vector<PreferencePair> ds;
  for (int i = 0; i < 50; ++i) {
    FeatureVector l = testing::random_features(default_schema(), rng);
    for (auto& x : l.values) x *= 0.9;
    FeatureVector w = l;
    for (auto& x : w.values) x += rng.uniform(0.01, 0.5);
    ds.push_back(pair_of(w, l));
  }
  const auto g = feature_gap_report(ds);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_GT(g.winner_means[i], g.loser_means[i]);
}

TEST(FeatureGap, NoiselessPositiveLatentFavoursWinners) {
  const LatentReward latent(LatentRewardSpec::linear({0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07}),
                            default_schema());
  const auto g = feature_gap_report(sample_preferences(latent, 940, 3));
  for (std::size_t i = 0; i < 7; ++i) EXPECT_GE(g.winner_means[i], g.loser_means[i]) << i;
}

// Property: dataset order does not matter.
TEST(FeatureGap, InvariantUnderPermutation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto ds = testing::random_pairs(default_schema(), rng, 1 + rng.below(40));
    const auto base = feature_gap_report(ds);
    rng.shuffle(std::span<PreferencePair>(ds));
    const auto perm = feature_gap_report(ds);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(perm.winner_means[i], base.winner_means[i], 1e-13);
      EXPECT_NEAR(perm.loser_means[i], base.loser_means[i], 1e-13);
    }
  }
}

}  // namespace
}  // namespace dkrm
