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

#include "dkrm/checkpoint.hpp"
#include "dkrm/dataset_io.hpp"
#include "dkrm/error.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

TEST(RewardCheckpoint, RoundTripIsExact) {
  testing::TempDir dir;
  Rng rng(1);
  const auto model = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
  TrainConfig cfg;
  cfg.seed = 99;
  cfg.hidden_dims = {16, 16};
  save_reward_checkpoint(dir / "m.ckpt", model, cfg);
  const auto back = load_reward_checkpoint(dir / "m.ckpt");
  EXPECT_TRUE(back.model.net == model.net);
  EXPECT_TRUE(back.model.schema == model.schema);
  ASSERT_TRUE(back.train_config.has_value());
  EXPECT_EQ(back.train_config->seed, 99u);
  EXPECT_EQ(train_config_json(*back.train_config), train_config_json(cfg));

  save_reward_checkpoint(dir / "n.ckpt", model, std::nullopt);
  EXPECT_FALSE(load_reward_checkpoint(dir / "n.ckpt").train_config.has_value());
}

TEST(PolicyCheckpoint, RoundTripIsExact) {
  testing::TempDir dir;
  Rng rng(2);
  const auto policy = PolicySelector::uniform_init(default_schema(), {8}, Activation::kRelu, rng);
  PolicyOptConfig cfg;
  cfg.beta = 0.25;
  cfg.variant = ObjectiveVariant::kClippedRatio;
  cfg.epsilon = 0.1;
  save_policy_checkpoint(dir / "p.ckpt", policy, cfg);
  const auto back = load_policy_checkpoint(dir / "p.ckpt");
  EXPECT_TRUE(back.policy.net == policy.net);
  EXPECT_EQ(back.config.beta, 0.25);
  EXPECT_EQ(back.config.variant, ObjectiveVariant::kClippedRatio);
  EXPECT_EQ(back.config.epsilon, 0.1);
  EXPECT_THROW(load_reward_checkpoint(dir / "p.ckpt"), DataError);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  testing::TempDir dir;
  Rng rng(3);
  const auto model = RewardModel::glorot(default_schema(), {4}, Activation::kTanh, rng);
  save_reward_checkpoint(dir / "m.ckpt", model, std::nullopt);
  const std::string good = read_text_file(dir / "m.ckpt");

  auto expect_bad = [&](std::string text, const char* needle) {
    write_text_file(dir / "bad.ckpt", text);
    try {
      load_reward_checkpoint(dir / "bad.ckpt");
      FAIL() << needle;
    } catch (const DataError& e) {
      const std::string msg = e.what();
      EXPECT_NE(msg.find("bad.ckpt"), std::string::npos) << msg;
    }
  };
  expect_bad("{not json", "parse");
  std::string wrong_fp = good;
  const auto pos = wrong_fp.find(default_schema().fingerprint());
  ASSERT_NE(pos, std::string::npos);
  wrong_fp[pos] = wrong_fp[pos] == 'a' ? 'b' : 'a';
  expect_bad(wrong_fp, "fingerprint");
  std::string wrong_format = good;
  wrong_format.replace(wrong_format.find("dkrm-checkpoint"), 15, "something-else!");
  expect_bad(wrong_format, "format");
  EXPECT_THROW(load_reward_checkpoint(dir / "absent.ckpt"), DataError);
}

}  // namespace
}  // namespace dkrm
