// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "desk_corpus.hpp"
#include "experiments.hpp"
#include "patchrnn/errors.hpp"
#include "patchrnn/trainer.hpp"

namespace patchrnn {
namespace {

using testing::desk_corpus;
using testing::desk_model;
using testing::encode_desk;

ModelConfig small_config() {
  ModelConfig c;
  c.code_seq_len = 80;
  c.msg_seq_len = 20;
  c.embed_dim = 16;
  c.lstm_hidden = 8;
  c.code_fc_dims = {64, 32, 16};
  c.msg_fc_dims = {16, 16};
  c.fusion_fc_dims = {32, 16, 2};
  c.batch_size = 8;
  c.lr = 5e-3;
  c.epochs = 5;
  return c;
}

TEST(Training, OverfitsThirtyTwoSamples) {
  auto r = testing::overfit_desk(32, 300, 101);
  RecordProperty("epochs", static_cast<int>(r.epochs_run));
  EXPECT_EQ(r.final_accuracy, 1.0) << "after " << r.epochs_run << " epochs";
  EXPECT_LE(r.epochs_run, 300u);
}

TEST(Training, BeatsMajorityBaselineOnDeskSplit) {
  auto r = testing::desk_holdout_run(500, 10, 32, 3);
  EXPECT_EQ(r.train_size, 400u);
  EXPECT_EQ(r.test_size, 100u);
  EXPECT_GT(r.test_accuracy, 0.5);
}

TEST(Training, LossDecreases) {
  const auto desk = desk_corpus(40, 12);
  ModelConfig cfg = small_config();
  PatchRnnModel model = desk_model(desk, cfg, 2);
  const auto samples = encode_desk(model, desk);
  TrainingHistory h = train(model, samples);
  ASSERT_EQ(h.epochs.size(), 5u);
  EXPECT_LT(measure(model, samples).loss, h.initial_loss);
  EXPECT_LT(h.epochs.back().train_loss, h.epochs.front().train_loss);
}

TEST(Training, RejectsDegenerateDatasets) {
  const auto desk = desk_corpus(6, 2);
  PatchRnnModel model = desk_model(desk, small_config(), 1);
  EXPECT_THROW(train(model, {}), EmptyDataset);
  std::vector<EncodedSample> security_only;
  for (const auto& s : encode_desk(model, desk)) {
    if (s.label == Label::kSecurity) security_only.push_back(s);
  }
  EXPECT_THROW(train(model, security_only), SingleClassDataset);
  std::vector<EncodedSample> unlabeled = encode_desk(model, desk);
  unlabeled[0].label.reset();
  EXPECT_THROW(train(model, unlabeled), Error);
}

TEST(Training, SameSeedSameResult) {
  const auto desk = desk_corpus(24, 30);
  auto run = [&] {
    PatchRnnModel model = desk_model(desk, small_config(), 1);
    TrainingHistory h = train(model, encode_desk(model, desk));
    return std::pair{h.to_json(), model.fingerprint()};
  };
  EXPECT_EQ(run(), run());
}

TEST(Training, HoldoutRestoresBestEpoch) {
  const auto desk = desk_corpus(40, 31);
  const std::vector<testing::DeskPatch> train_part(desk.begin(), desk.begin() + 30);
  const std::vector<testing::DeskPatch> held(desk.begin() + 30, desk.end());
  ModelConfig cfg = small_config();
  cfg.epochs = 6;
  PatchRnnModel model = desk_model(train_part, cfg, 1);
  const auto holdout = encode_desk(model, held);
  TrainOptions opts;
  opts.holdout = &holdout;
  std::size_t seen = 0;
  opts.on_epoch = [&](const EpochRecord& r) { seen = r.epoch; };
  TrainingHistory h = train(model, encode_desk(model, train_part), opts);
  EXPECT_EQ(seen, 6u);
  ASSERT_TRUE(h.best_epoch.has_value());
  const EpochRecord& best = h.epochs[*h.best_epoch - 1];
  for (const auto& r : h.epochs) EXPECT_LE(*r.validation_accuracy, *best.validation_accuracy);
  EXPECT_DOUBLE_EQ(measure(model, holdout).accuracy, *best.validation_accuracy);
}

TEST(Training, StopHookEndsEarly) {
  const auto desk = desk_corpus(16, 32);
  PatchRnnModel model = desk_model(desk, small_config(), 1);
  TrainOptions opts;
  opts.stop_after = [](const EpochRecord& r) { return r.epoch == 2; };
  EXPECT_EQ(train(model, encode_desk(model, desk), opts).epochs.size(), 2u);
}

}  // namespace
}  // namespace patchrnn
