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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dkrm/error.hpp"
#include "dkrm/optim.hpp"
#include "dkrm/reward_model.hpp"
#include "dkrm/synth.hpp"
#include "dkrm/train.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

RewardModel linear_model(std::span<const double> w, double bias = 0.0) {
  Mlp net({7, 1}, Activation::kTanh);
  std::copy(w.begin(), w.end(), net.weights(0).begin());
  net.bias(0)[0] = bias;
  return RewardModel(default_schema(), std::move(net));
}

PreferencePair make_pair(FeatureVector w, FeatureVector l) {
  PreferencePair p;
  p.context_id = "c";
  p.winner.candidate_id = "w";
  p.loser.candidate_id = "l";
  p.winner_features = std::move(w);
  p.loser_features = std::move(l);
  return p;
}

// --- forward --------------------------------------------------------------------

TEST(Forward, ZeroNetworkIsZero) {
  const auto m = RewardModel::zeros(default_schema(), {16, 16}, Activation::kTanh);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(m.score(testing::random_features(default_schema(), rng)), 0.0);
}

TEST(Forward, LinearSeventhsOnAllFives) {
  const std::vector<double> w(7, 1.0 / 7.0);
  EXPECT_NEAR(linear_model(w).score(FeatureVector{5, 5, 5, 5, 5, 5, 5}), 1.0, 1e-15);
}

TEST(Forward, Seed42MatchesIndependentRecomputation) {
  // Oracle: the seed-42 Glorot parameters were exported and the forward pass
  // recomputed with numpy (tanh, tanh, identity on inputs scaled by 1/5).
  constexpr double kOracle = -0.1324007426372041;
  Rng rng(42);
  const auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
  EXPECT_NEAR(m.score(FeatureVector{3.6, 3.9, 3.8, 4.0, 4.1, 4.1, 4.6}), kOracle, 1e-12);
}

TEST(Forward, GlorotBoundsHold) {
  Rng rng(8);
  const auto net = Mlp::glorot_uniform({7, 16, 16, 1}, Activation::kTanh, rng);
  const std::size_t dims[] = {7, 16, 16, 1};
  for (std::size_t l = 0; l < 3; ++l) {
    const double a = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    for (double v : net.weights(l)) EXPECT_LE(std::abs(v), a);
  }
}

TEST(Forward, DimensionMismatchThrows) {
  EXPECT_THROW(RewardModel(default_schema(), Mlp({6, 1}, Activation::kTanh)), DataError);
  const auto m = RewardModel::zeros(default_schema(), {4}, Activation::kRelu);
  EXPECT_THROW(m.score(FeatureVector{1, 2, 3}), DataError);
}

// --- loss -----------------------------------------------------------------------

TEST(EloLoss, ZeroNetworkIsLn2) {
  const auto m = RewardModel::zeros(default_schema(), {16, 16}, Activation::kTanh);
  Rng rng(2);
  const auto pairs = testing::random_pairs(default_schema(), rng, 37);
  EXPECT_NEAR(elo_loss(m, pairs), std::log(2.0), 1e-15);
}

TEST(EloLoss, UnitGapClosedForm) {
  // Reward = first feature / 5; winner 5, loser 0 gives r_w - r_l = 1.
  const std::vector<double> w{1, 0, 0, 0, 0, 0, 0};
  const auto m = linear_model(w);
  const std::vector<PreferencePair> one{
      make_pair({5, 1, 1, 1, 1, 1, 1}, {0, 1, 1, 1, 1, 1, 1})};
  // ln(1 + e^-1) evaluated independently.
  EXPECT_NEAR(elo_loss(m, one), 0.31326168751822286, 1e-15);
}

TEST(EloLoss, Saturates) {
  const std::vector<double> w{20, 0, 0, 0, 0, 0, 0};
  const std::vector<PreferencePair> one{
      make_pair({5, 1, 1, 1, 1, 1, 1}, {0, 1, 1, 1, 1, 1, 1})};
  EXPECT_LT(elo_loss(linear_model(w), one), 1e-8);
}

TEST(EloLoss, EmptyBatchThrows) {
  const auto m = RewardModel::zeros(default_schema(), {}, Activation::kTanh);
  EXPECT_THROW(elo_loss(m, {}), DataError);
  EXPECT_THROW(elo_loss_grad(m, {}), DataError);
  EXPECT_THROW(preference_accuracy(m, {}), DataError);
}

// Property: permutation invariance and output-shift invariance.
TEST(EloLoss, InvariantUnderPermutationAndOutputShift) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto m = RewardModel::glorot(default_schema(), {8}, Activation::kTanh, rng);
    auto pairs = testing::random_pairs(default_schema(), rng, 2 + rng.below(30));
    const double base = elo_loss(m, pairs);
    const double acc = preference_accuracy(m, pairs);
    rng.shuffle(std::span<PreferencePair>(pairs));
    EXPECT_NEAR(elo_loss(m, pairs), base, 1e-13);
    m.net.bias(m.net.layer_count() - 1)[0] += rng.uniform(-3, 3);
    EXPECT_NEAR(elo_loss(m, pairs), base, 1e-12);
    EXPECT_EQ(preference_accuracy(m, pairs), acc);
  }
}

// --- gradient -------------------------------------------------------------------

TEST(EloGrad, SymmetricBatchOnZeroNetIsZero) {
  const auto m = RewardModel::zeros(default_schema(), {16, 16}, Activation::kTanh);
  Rng rng(3);
  const auto a = testing::random_features(default_schema(), rng);
  const auto b = testing::random_features(default_schema(), rng);
  std::vector<PreferencePair> batch{make_pair(a, b), make_pair(b, a)};
  const auto lg = elo_loss_grad(m, batch);
  for (double g : lg.grad) EXPECT_EQ(g, 0.0);
}

TEST(EloGrad, LinearSinglePairClosedForm) {
  Rng rng(4);
  std::vector<double> w(7);
  for (auto& x : w) x = rng.uniform(-1, 1);
  const auto m = linear_model(w, 0.3);
  const auto a = testing::random_features(default_schema(), rng);
  const auto b = testing::random_features(default_schema(), rng);
  const std::vector<PreferencePair> one{make_pair(a, b)};
  const auto lg = elo_loss_grad(m, one);
  const double d = m.score(a) - m.score(b);
  const double s = 1.0 / (1.0 + std::exp(d));  // sigma(-d)
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(lg.grad[i], -s * (a[i] / 5.0 - b[i] / 5.0), 1e-15);
  }
  EXPECT_NEAR(lg.grad[7], 0.0, 1e-15);  // bias cancels
}

TEST(EloGrad, MatchesFiniteDifferencesSeed7Batch8) {
  Rng rng(7);
  auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
  const auto batch = testing::random_pairs(default_schema(), rng, 8);
  const auto lg = elo_loss_grad(m, batch);
  const auto fd = testing::central_differences(m.net.parameters(),
                                               [&] { return elo_loss(m, batch); }, 1e-5);
  for (std::size_t i = 0; i < fd.size(); ++i) {
    EXPECT_LE(testing::relative_error(lg.grad[i], fd[i], 1e-6), 1e-4) << "coordinate " << i;
  }
}

TEST(EloGrad, ReluMatchesFiniteDifferences) {
  Rng rng(17);
  auto m = RewardModel::glorot(default_schema(), {12}, Activation::kRelu, rng);
  const auto batch = testing::random_pairs(default_schema(), rng, 16);
  const auto lg = elo_loss_grad(m, batch);
  const auto fd = testing::central_differences(m.net.parameters(),
                                               [&] { return elo_loss(m, batch); }, 1e-5);
  for (std::size_t i = 0; i < fd.size(); ++i) {
    EXPECT_LE(testing::relative_error(lg.grad[i], fd[i], 1e-6), 1e-4) << "coordinate " << i;
  }
}

// --- accuracy -------------------------------------------------------------------

TEST(PreferenceAccuracy, LatentOnOwnNoiselessPairsIsOne) {
  const std::vector<double> w{0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07};
  const LatentReward latent(LatentRewardSpec::linear(w), default_schema());
  const auto pairs = sample_preferences(latent, 500, 9);
  // Same weights on normalized inputs rank identically.
  EXPECT_EQ(preference_accuracy(linear_model(w), pairs), 1.0);
}

TEST(PreferenceAccuracy, ZeroNetIsHalf) {
  Rng rng(5);
  const auto pairs = testing::random_pairs(default_schema(), rng, 99);
  EXPECT_EQ(preference_accuracy(RewardModel::zeros(default_schema(), {3}, Activation::kTanh), pairs),
            0.5);
}

TEST(PreferenceAccuracy, MatchesBruteForceRecount) {
  Rng net_rng(3);
  const auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, net_rng);
  Rng data_rng(4);
  const auto pairs = testing::random_pairs(default_schema(), data_rng, 1000);
  double hits = 0.0;
  for (const auto& p : pairs) {
    const double rw = m.score(p.winner_features), rl = m.score(p.loser_features);
    hits += rw > rl ? 1.0 : (rw == rl ? 0.5 : 0.0);
  }
  EXPECT_EQ(preference_accuracy(m, pairs), hits / 1000.0);
}

// --- optimizer and schedule -----------------------------------------------------

TEST(AdamW, FirstStepClosedForm) {
  // After one step m_hat = g and v_hat = g^2, so the update is
  // lr * (g / (|g| + eps) + wd * p).
  AdamW opt(3, {.weight_decay = 0.05});
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -0.1, 0.0};
  opt.step(p, g, 0.01);
  const double eps = 1e-8;
  EXPECT_NEAR(p[0], 1.0 - 0.01 * (0.3 / (0.3 + eps) + 0.05 * 1.0), 1e-15);
  EXPECT_NEAR(p[1], -2.0 - 0.01 * (-0.1 / (0.1 + eps) + 0.05 * -2.0), 1e-15);
  EXPECT_NEAR(p[2], 0.5 - 0.01 * 0.05 * 0.5, 1e-15);
  EXPECT_EQ(opt.steps_taken(), 1u);
}

TEST(WarmupCosine, ShapeAndEndpoints) {
  const WarmupCosineSchedule s(0.1, 100, 10);
  EXPECT_NEAR(s.at(0), 0.01, 1e-15);
  EXPECT_NEAR(s.at(9), 0.1, 1e-15);
  EXPECT_NEAR(s.at(10), 0.1, 1e-15);
  EXPECT_NEAR(s.at(55), 0.05, 1e-12);  // halfway through decay
  EXPECT_LT(s.at(99), 1e-3);
  for (std::size_t t = 11; t < 100; ++t) EXPECT_LE(s.at(t), s.at(t - 1));
  const WarmupCosineSchedule flat(0.1, 10, 0);
  EXPECT_NEAR(flat.at(0), 0.1, 1e-15);
}

// --- training -------------------------------------------------------------------

TEST(TrainReward, SinglePairOneStepDescends) {
  Rng rng(6);
  const auto pairs = testing::random_pairs(default_schema(), rng, 1);
  TrainConfig c;
  c.batch_size = 1;
  c.total_epochs = 1;
  c.holdout_fraction = 0.0;
  c.warmup_fraction = 0.0;
  c.learning_rate = 1e-3;
  c.weight_decay = 0.0;
  Rng init(11);
  const auto before = RewardModel::glorot(default_schema(), c.hidden_dims, c.activation, init);
  const auto r = train_reward(pairs, default_schema(), c, 11);
  EXPECT_LT(elo_loss(r.model, pairs), elo_loss(before, pairs));
}

TEST(TrainReward, BitReproducible) {
  const LatentReward latent(LatentRewardSpec::linear({0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07}),
                            default_schema());
  const auto pairs = sample_preferences(latent, 200, 1);
  TrainConfig c;
  c.total_epochs = 5;
  c.seed = 3;
  const auto a = train_reward(pairs, default_schema(), c, 4);
  const auto b = train_reward(pairs, default_schema(), c, 4);
  EXPECT_TRUE(a.model.net == b.model.net);
  EXPECT_EQ(a.report.to_csv(), b.report.to_csv());
}

TEST(TrainReward, NoiselessLinearReachesNinety) {
  const LatentReward latent(LatentRewardSpec::linear({0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07}),
                            default_schema());
  const auto pairs = sample_preferences(latent, 940, 1);
  const auto r = train_reward(pairs, default_schema(), TrainConfig{}, 1);
  ASSERT_TRUE(r.report.epochs.back().holdout_accuracy.has_value());
  EXPECT_GE(*r.report.epochs.back().holdout_accuracy, 0.90);
  EXPECT_EQ(r.report.train_size + r.report.holdout_size, 940u);
  EXPECT_EQ(r.report.holdout_size, 94u);
}

// Property: train loss is non-increasing up to 2% transients on the
// noiseless linear oracle.
TEST(TrainReward, LossMonotoneWithinTransientTolerance) {
  const LatentReward latent(LatentRewardSpec::linear({0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07}),
                            default_schema());
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto pairs = sample_preferences(latent, 940, seed);
    TrainConfig c;
    c.seed = seed;
    const auto r = train_reward(pairs, default_schema(), c, seed);
    for (std::size_t e = 1; e < r.report.epochs.size(); ++e) {
      EXPECT_LE(r.report.epochs[e].train_loss, 1.02 * r.report.epochs[e - 1].train_loss)
          << "seed " << seed << " epoch " << e + 1;
    }
    for (const auto& ep : r.report.epochs) {
      EXPECT_TRUE(std::isfinite(ep.train_loss));
      EXPECT_GE(ep.train_loss, 0.0);
    }
  }
}

TEST(TrainReward, ReportCsvShape) {
  Rng rng(7);
  const auto pairs = testing::random_pairs(default_schema(), rng, 40);
  TrainConfig c;
  c.total_epochs = 3;
  c.batch_size = 8;
  const auto r = train_reward(pairs, default_schema(), c, 0);
  const std::string csv = r.report.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,holdout_loss,holdout_acc");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(TrainReward, RejectsOversizedBatchAndBadConfig) {
  Rng rng(8);
  const auto pairs = testing::random_pairs(default_schema(), rng, 10);
  TrainConfig c;
  c.batch_size = 64;
  EXPECT_THROW(train_reward(pairs, default_schema(), c, 0), DataError);
  c.batch_size = 4;
  c.warmup_fraction = 1.0;
  EXPECT_THROW(train_reward(pairs, default_schema(), c, 0), DataError);
  EXPECT_THROW(train_reward({}, default_schema(), TrainConfig{}, 0), DataError);
}

TEST(TrainReward, DivergenceNamesTheStep) {
  Rng rng(9);
  const auto pairs = testing::random_pairs(default_schema(), rng, 32);
  TrainConfig c;
  c.learning_rate = 1e305;
  c.batch_size = 8;
  c.warmup_fraction = 0.0;
  c.holdout_fraction = 0.0;
  c.activation = Activation::kRelu;
  try {
    train_reward(pairs, default_schema(), c, 0);
    FAIL() << "expected divergence";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace dkrm
