// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "desk_corpus.hpp"
#include "oracles.hpp"
#include "patchrnn/errors.hpp"
#include "patchrnn/features.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/nn/ops.hpp"
#include "patchrnn/trainer.hpp"

namespace patchrnn {
namespace {

using nn::Tensor;

std::vector<PreparedPatch> prepared_desk(std::size_t n, std::uint64_t seed,
                                         const ModelConfig& cfg) {
  std::vector<PreparedPatch> out;
  for (const auto& d : testing::desk_corpus(n, seed)) {
    out.push_back(prepare_patch(parse_patch(d.text), cfg.prepare_options()));
  }
  return out;
}

PatchRnnModel model_for(const ModelConfig& cfg, std::size_t n = 20, std::uint64_t seed = 5) {
  Word2VecConfig w2v;
  w2v.dim = cfg.embed_dim;
  w2v.epochs = 1;
  return build_model(prepared_desk(n, seed, cfg), cfg, w2v);
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.code_seq_len = 40;
  c.msg_seq_len = 12;
  c.embed_dim = 6;
  c.lstm_hidden = 3;
  c.code_fc_dims = {24, 10, 5};
  c.msg_fc_dims = {6, 5};
  c.fusion_fc_dims = {10, 4, 2};
  return c;
}

const PatchRnnModel& default_model() {
  static const PatchRnnModel model = model_for(ModelConfig{});
  return model;
}

PatchFile fixture_commit(int n) {
  return parse_patch(read_file(
      testing::data_path(n == 1 ? "commits/reseturi_null.patch" : "commits/sigkill.patch")));
}

std::vector<double> vec(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

std::vector<double> code_vector(const PatchRnnModel& m, const EncodedCode& a,
                                const EncodedCode& b) {
  nn::Tape tape;
  return vec(m.code_branch(tape, a, b));
}

TEST(Features, PadAndKeywordRows) {
  std::vector<double> row(kTokenTypeDim + 1, -1.0);
  write_type_features(pad_token(), row);
  EXPECT_EQ(row, (std::vector<double>{0, 0, 0, 0, 0, 1, 0}));
  write_type_features(AbstractToken{"if", TokenKind::kKeyword, +1}, row);
  EXPECT_EQ(row, (std::vector<double>{1, 0, 0, 0, 0, 0, 1}));
  write_type_features(AbstractToken{"VAR0", TokenKind::kIdentifier, -1}, row);
  EXPECT_EQ(row, (std::vector<double>{0, 1, 0, 0, 0, 0, -1}));
  EXPECT_EQ(code_feature_dim(128), 135u);
}

TEST(Features, AssembleChecksLength) {
  Vocabulary v = Vocabulary::from_tokens({"<pad>", "<unk>", "if", "VAR0"});
  EmbeddingTable table(v, 2, std::vector<double>(v.size() * 2, 0.5));
  std::vector<AbstractToken> tokens{{"if", TokenKind::kKeyword, 1},
                                    {"VAR0", TokenKind::kIdentifier, 0}};
  EXPECT_THROW(assemble_code_features(tokens, table, 3), DimensionMismatch);
  tokens.push_back(pad_token());
  CodeFeatureSequence seq = assemble_code_features(tokens, table, 3);
  EXPECT_EQ(seq.width, 2 + kTokenTypeDim + 1);
  EXPECT_EQ(seq.valid_length, 2u);
  EXPECT_EQ(seq.row(0)[0], 0.5);
  EXPECT_EQ(seq.row(0)[2], 1.0);
  EXPECT_EQ(seq.row(0).back(), 1.0);
  EXPECT_EQ(seq.row(2)[0], 0.0);
  EXPECT_EQ(seq.row(2)[2 + 5], 1.0);
}

TEST(Model, ModelFeaturesMatchAssembledFeatures) {
  const PatchRnnModel& m = default_model();
  PreparedPatch p = prepare_patch(fixture_commit(1));
  EncodedSample s = m.encode(p);
  CodeFeatureSequence seq = m.code_features(s.patched);
  ASSERT_EQ(seq.length, 1100u);
  ASSERT_EQ(seq.width, 135u);
  EXPECT_EQ(seq.valid_length, valid_length(p.patched));
  for (std::size_t i = 0; i < seq.length; ++i) {
    std::vector<double> types(kTokenTypeDim + 1);
    write_type_features(p.patched[i], types);
    auto row = seq.row(i);
    for (std::size_t k = 0; k < types.size(); ++k) ASSERT_EQ(row[128 + k], types[k]) << i;
    if (i >= seq.valid_length) {
      for (std::size_t k = 0; k < 128; ++k) ASSERT_EQ(row[k], 0.0);
    }
  }
}

TEST(Model, ShapeAuditOverVariedInputs) {
  const PatchRnnModel& m = default_model();
  std::vector<PatchFile> inputs{fixture_commit(1), fixture_commit(2)};
  for (const auto& d : testing::desk_corpus(6, 41)) inputs.push_back(parse_patch(d.text));
  inputs.push_back(parse_patch(
      "diff --git a/README.md b/README.md\n--- a/README.md\n+++ b/README.md\n"
      "@@ -1 +1 @@\n-old\n+new\n"));
  for (const PatchFile& p : inputs) {
    ForwardTrace t;
    nn::Tape tape;
    Tensor logits = m.forward(tape, m.encode(p), &t);
    EXPECT_EQ(t.code_sequence_length, 1100u);
    EXPECT_EQ(t.code_feature_width, 135u);
    EXPECT_EQ(t.code_layer_widths, (std::vector<std::size_t>{64, 64}));
    EXPECT_EQ(t.twin_summary_width, 128u);
    EXPECT_EQ(t.twin_concat_width, 256u);
    EXPECT_EQ(t.code_fc_widths, (std::vector<std::size_t>{256, 128, 64}));
    EXPECT_EQ(t.message_sequence_length, 200u);
    EXPECT_EQ(t.message_embedding_width, 128u);
    EXPECT_EQ(t.message_summary_width, 64u);
    EXPECT_EQ(t.message_fc_widths, (std::vector<std::size_t>{64, 64}));
    EXPECT_EQ(t.fusion_input_width, 128u);
    EXPECT_EQ(t.fusion_fc_widths, (std::vector<std::size_t>{128, 32, 2}));
    EXPECT_EQ(logits.shape(), (nn::Shape{1, 2}));
    auto probs = m.probabilities(m.encode(p));
    EXPECT_NEAR(probs[0] + probs[1], 1.0, 1e-12);
  }
}

TEST(Model, TwinOrderMatters) {
  ModelConfig cfg;
  cfg.seed = 7;
  PatchRnnModel m = model_for(cfg);
  EncodedSample s = m.encode(fixture_commit(1));
  EXPECT_NE(code_vector(m, s.unpatched, s.patched), code_vector(m, s.patched, s.unpatched));
}

TEST(Model, ZeroLstmGivesInputIndependentCodeVector) {
  PatchRnnModel m = model_for(tiny_config());
  for (std::size_t l = 0; l < m.twin().forward.size(); ++l) {
    for (auto* p : {&m.twin().forward[l], &m.twin().backward[l]}) {
      for (Tensor t : p->tensors()) std::fill(t.values().begin(), t.values().end(), 0.0);
    }
  }
  const auto desk = testing::desk_corpus(4, 8);
  const EncodedSample a = m.encode(parse_patch(desk[0].text));
  const EncodedSample b = m.encode(parse_patch(desk[1].text));
  EXPECT_EQ(code_vector(m, a.unpatched, a.patched), code_vector(m, b.unpatched, b.patched));
  nn::Tape tape;
  for (double v : m.twin_summary(tape, a.patched).values()) EXPECT_EQ(v, 0.0);
}

// 4h(in + h + 1) per direction, written out independently of the layer code.
TEST(Model, TwinParameterCountOracle) {
  const PatchRnnModel& m = default_model();
  auto lstm = [](std::size_t in, std::size_t h) { return 4 * h * (in + h + 1); };
  const std::size_t oracle = 2 * lstm(135, 32) + 2 * lstm(64, 32);
  EXPECT_EQ(oracle, 67840u);
  std::size_t counted = 0;
  for (std::size_t l = 0; l < 2; ++l) {
    counted += m.twin().forward[l].parameter_count() + m.twin().backward[l].parameter_count();
  }
  EXPECT_EQ(counted, oracle);
  std::size_t total = 0;
  for (const Tensor& t : m.parameters()) total += t.size();
  EXPECT_EQ(m.parameter_count(), total);
}

TEST(Model, PaddingBeyondValidPrefixChangesNothing) {
  const PatchRnnModel& m = default_model();
  Rng rng(12);
  const auto desk = testing::desk_corpus(100, 13);
  for (const auto& d : desk) {
    EncodedSample s = m.encode(parse_patch(d.text));
    EncodedCode longer = s.patched;
    longer.length += 1 + rng.below(400);
    nn::Tape tape;
    const auto base = vec(m.twin_summary(tape, s.patched));
    const auto padded = vec(m.twin_summary(tape, longer));
    for (std::size_t i = 0; i < base.size(); ++i) ASSERT_NEAR(base[i], padded[i], 1e-12);
    const auto msg = vec(m.message_branch(tape, s.message_ids, s.message_length));
    const auto msg_padded =
        vec(m.message_branch(tape, s.message_ids, s.message_length + 1 + rng.below(300)));
    for (std::size_t i = 0; i < msg.size(); ++i) ASSERT_NEAR(msg[i], msg_padded[i], 1e-12);
  }
}

TEST(Model, TwinSummaryMatchesFullFeatureMatrix) {
  const PatchRnnModel& m = default_model();
  EncodedSample s = m.encode(fixture_commit(2));
  CodeFeatureSequence seq = m.code_features(s.unpatched);
  nn::Tape tape;
  Tensor x = Tensor::from({seq.length, seq.width}, seq.values);
  std::vector<double> expected;
  for (std::size_t l = 0; l < 2; ++l) {
    nn::BiLstmRun run =
        nn::bilstm_forward(tape, m.twin().forward[l], m.twin().backward[l], x, seq.valid_length);
    for (double v : run.forward.final_h.values()) expected.push_back(v);
    for (double v : run.backward.final_h.values()) expected.push_back(v);
    x = run.outputs;
  }
  const auto got = vec(m.twin_summary(tape, s.unpatched));
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

TEST(Model, ZeroFusionHeadIsUndecided) {
  PatchRnnModel m = model_for(tiny_config());
  const nn::Dense& last = m.fusion_fc().layers.back();
  for (Tensor t : last.tensors()) std::fill(t.values().begin(), t.values().end(), 0.0);
  for (const auto& d : testing::desk_corpus(5, 2)) {
    Prediction p = m.predict(parse_patch(d.text));
    EXPECT_DOUBLE_EQ(p.probability, 0.5);
    EXPECT_EQ(p.label, Label::kSecurity);
  }
}

TEST(Model, SharedTwinWeightsAccumulateBothSides) {
  PatchRnnModel m = model_for(tiny_config());
  EncodedSample s = m.encode(parse_patch(testing::desk_corpus(2, 3)[0].text));
  std::vector<Tensor> shared;
  for (std::size_t l = 0; l < 2; ++l) {
    for (const Tensor& t : m.twin().forward[l].tensors()) shared.push_back(t);
    for (const Tensor& t : m.twin().backward[l].tensors()) shared.push_back(t);
  }
  auto readout = [&](nn::Tape& tape, const Tensor& v) {
    Rng r(77);
    Tensor w = testing::random_tensor({1, v.cols()}, r);
    return nn::sum_squares(tape, nn::linear(tape, v, w, Tensor::zeros({1})));
  };
  // Per-side gradients from separate passes must add up to the joint one.
  auto grads_of = [&](const std::function<Tensor(nn::Tape&)>& f) {
    for (Tensor t : shared) t.zero_grad();
    nn::Tape tape;
    Tensor loss = f(tape);
    tape.backward(loss);
    std::vector<std::vector<double>> g;
    for (Tensor t : shared) g.emplace_back(t.grad().begin(), t.grad().end());
    return g;
  };
  // Linear read-out w over [old | new]: the joint gradient is the sum of the
  // per-side gradients under the matching halves of w.
  const std::size_t width = 2 * 2 * 3;
  Rng wr(78);
  const Tensor w = testing::random_tensor({1, 2 * width}, wr);
  auto half = [&](std::size_t offset) {
    Tensor h = Tensor::zeros({1, width});
    for (std::size_t i = 0; i < width; ++i) h[i] = w[offset + i];
    return h;
  };
  const auto g_both = grads_of([&](nn::Tape& t) {
    Tensor cat = nn::concat_cols(t, {m.twin_summary(t, s.unpatched), m.twin_summary(t, s.patched)});
    return nn::linear(t, cat, w, Tensor::zeros({1}));
  });
  const auto g_old = grads_of(
      [&](nn::Tape& t) { return nn::linear(t, m.twin_summary(t, s.unpatched), half(0), Tensor::zeros({1})); });
  const auto g_new = grads_of(
      [&](nn::Tape& t) { return nn::linear(t, m.twin_summary(t, s.patched), half(width), Tensor::zeros({1})); });
  for (std::size_t k = 0; k < shared.size(); ++k) {
    for (std::size_t i = 0; i < g_both[k].size(); ++i) {
      ASSERT_NEAR(g_both[k][i], g_old[k][i] + g_new[k][i], 1e-10);
    }
  }
  EXPECT_NE(g_old, g_new);

  Rng rng(5);
  auto check = testing::check_gradients(
      shared,
      [&](nn::Tape& t) { return readout(t, m.code_branch(t, s.unpatched, s.patched)); }, rng,
      12);
  EXPECT_LT(check.max_rel_error, 1e-4) << check.worst;
}

TEST(Model, ComposedGradientOnTwoSampleBatch) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ModelConfig cfg = tiny_config();
    cfg.seed = seed;
    PatchRnnModel m = model_for(cfg, 10, seed);
    const auto desk = testing::desk_corpus(2, seed + 20);
    std::vector<EncodedSample> batch;
    for (const auto& d : desk) {
      PatchFile p = parse_patch(d.text);
      p.label = d.label;
      batch.push_back(m.encode(p));
    }
    auto batch_loss = [&] {
      double total = 0.0;
      for (const auto& s : batch) {
        const int y = *s.label == Label::kSecurity ? 1 : 0;
        total -= std::log(m.probabilities(s)[static_cast<std::size_t>(y)]) / 2.0;
      }
      return total;
    };
    const auto params = m.trainable_parameters();
    for (Tensor t : params) t.zero_grad();
    for (const auto& s : batch) {
      const int y = *s.label == Label::kSecurity ? 1 : 0;
      nn::Tape tape;
      Tensor loss = nn::softmax_cross_entropy(tape, m.forward(tape, s),
                                              std::span<const int>(&y, 1), {}, 2.0);
      // normalizer 2 with unit weight: each sample contributes half.
      tape.backward(loss);
    }
    Rng rng(seed);
    double worst = 0.0;
    const double h = 1e-5;
    for (Tensor t : params) {
      for (int k = 0; k < 4; ++k) {
        const std::size_t i = rng.below(t.size());
        const double analytic = t.grad()[i];
        const double saved = t[i];
        t[i] = saved + h;
        const double up = batch_loss();
        t[i] = saved - h;
        const double down = batch_loss();
        t[i] = saved;
        worst = std::max(worst, testing::relative_error(analytic, (up - down) / (2 * h)));
      }
    }
    EXPECT_LT(worst, 1e-4) << "seed " << seed;
  }
}

TEST(Model, CheckpointRoundTripIsBitIdentical) {
  ModelConfig cfg;
  PatchRnnModel m = model_for(cfg, 50, 9);
  const auto path = std::filesystem::temp_directory_path() / "patchrnn_model_test.ckpt";
  m.save(path);
  PatchRnnModel loaded = PatchRnnModel::load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.config(), m.config());
  EXPECT_EQ(loaded.fingerprint(), m.fingerprint());
  for (const auto& d : testing::desk_corpus(50, 9)) {
    PatchFile p = parse_patch(d.text);
    EXPECT_EQ(loaded.probabilities(loaded.encode(p)), m.probabilities(m.encode(p)));
  }
  std::string bytes = m.serialize();
  EXPECT_THROW(PatchRnnModel::deserialize(bytes.substr(0, bytes.size() / 2)), Error);
}

TEST(Model, CloneIsIndependent) {
  PatchRnnModel m = model_for(tiny_config());
  PatchRnnModel c = m.clone();
  EXPECT_EQ(c.fingerprint(), m.fingerprint());
  Tensor w = c.fusion_fc().layers[0].W;
  w[0] += 1.0;
  EXPECT_NE(c.fingerprint(), m.fingerprint());
}

TEST(Model, PatchWithoutCodeStillPredicts) {
  const PatchRnnModel& m = default_model();
  PatchFile p = parse_patch(
      "diff --git a/docs/guide.md b/docs/guide.md\n--- a/docs/guide.md\n+++ b/docs/guide.md\n"
      "@@ -1 +1 @@\n-old\n+new\n");
  EncodedSample s = m.encode(p);
  EXPECT_TRUE(s.unpatched.ids.empty());
  EXPECT_TRUE(s.patched.ids.empty());
  Prediction pred = m.predict(s);
  EXPECT_TRUE(std::isfinite(pred.probability));
  EXPECT_GE(pred.probability, 0.0);
  EXPECT_LE(pred.probability, 1.0);
}

TEST(Model, EncodeRejectsWrongLengths) {
  const PatchRnnModel& m = default_model();
  PrepareOptions o;
  o.code_length = 50;
  EXPECT_THROW(m.encode(prepare_patch(fixture_commit(1), o)), DimensionMismatch);
}

TEST(ModelConfig, DefaultsAndValidation) {
  ModelConfig c;
  EXPECT_EQ(c.code_seq_len, 1100u);
  EXPECT_EQ(c.msg_seq_len, 200u);
  EXPECT_EQ(c.code_feature_width(), 135u);
  EXPECT_EQ(c.batch_size, 512u);
  EXPECT_DOUBLE_EQ(c.lr, 5e-4);
  EXPECT_EQ(c.epochs, 1000u);
  EXPECT_NO_THROW(c.validate());
  for (auto mutate : std::vector<void (*)(ModelConfig&)>{
           [](ModelConfig& m) { m.epochs = 0; }, [](ModelConfig& m) { m.lr = 0.0; },
           [](ModelConfig& m) { m.batch_size = 0; },
           [](ModelConfig& m) { m.code_fc_dims = {255, 128, 64}; },
           [](ModelConfig& m) { m.fusion_fc_dims = {128, 32, 3}; },
           [](ModelConfig& m) { m.msg_fc_dims = {64, 32}; }}) {
    ModelConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), ConfigError);
  }
}

TEST(ModelConfig, JsonRoundTrip) {
  ModelConfig c = tiny_config();
  c.security_weight = 2.5;
  c.seed = 1234567890123ULL;
  EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
  EXPECT_THROW(ModelConfig::from_json("{}"), ConfigError);
  EXPECT_THROW(ModelConfig::from_json("not json"), ConfigError);
}

}  // namespace
}  // namespace patchrnn
