// SPDX-License-Identifier: Apache-2.0
//
// The two-branch classifier: a twin bi-LSTM over the unpatched and patched
// code, a bi-LSTM text branch over the message, and a dense fusion head.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchrnn/checkpoint.hpp"
#include "patchrnn/embedding.hpp"
#include "patchrnn/features.hpp"
#include "patchrnn/nn/layers.hpp"
#include "patchrnn/patch.hpp"
#include "patchrnn/pipeline.hpp"

namespace patchrnn {

struct ModelConfig {
  std::size_t code_seq_len = kDefaultCodeLength;
  std::size_t msg_seq_len = kDefaultMessageLength;
  std::size_t embed_dim = 128;
  std::size_t lstm_hidden = 32;
  std::size_t code_lstm_layers = 2;
  std::vector<std::size_t> code_fc_dims{256, 128, 64};
  std::vector<std::size_t> msg_fc_dims{64, 64};
  std::vector<std::size_t> fusion_fc_dims{128, 32, 2};
  std::size_t batch_size = 512;
  double lr = 5e-4;
  std::size_t epochs = 1000;
  std::uint64_t seed = 1;
  bool embedding_trainable = true;
  /// Loss weight of security samples (non-security samples weigh 1).
  double security_weight = 1.0;
  bool include_all_languages = false;

  std::size_t code_feature_width() const { return code_feature_dim(embed_dim); }
  PrepareOptions prepare_options() const;

  /// Throws Error when the layer dimensions do not chain.
  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);
  bool operator==(const ModelConfig&) const = default;
};

struct EncodedCode {
  std::vector<std::size_t> ids;  // vocabulary indices of the valid prefix
  std::vector<double> types;     // valid x (kTokenTypeDim + 1)
  std::size_t length = 0;        // normalized length including pads
};

struct EncodedSample {
  EncodedCode unpatched;
  EncodedCode patched;
  std::vector<std::size_t> message_ids;  // valid prefix
  std::size_t message_length = 0;
  std::optional<Label> label;
};

struct Prediction {
  Label label = Label::kNonSecurity;
  double probability = 0.0;  // of the security class
};

Prediction make_prediction(double security_probability);

/// Activation widths seen during one forward pass.
struct ForwardTrace {
  std::size_t code_sequence_length = 0;
  std::size_t code_feature_width = 0;
  std::vector<std::size_t> code_layer_widths;  // per stacked layer output
  std::size_t twin_summary_width = 0;          // per side
  std::size_t twin_concat_width = 0;
  std::vector<std::size_t> code_fc_widths;
  std::size_t message_sequence_length = 0;
  std::size_t message_embedding_width = 0;
  std::size_t message_summary_width = 0;
  std::vector<std::size_t> message_fc_widths;
  std::size_t fusion_input_width = 0;
  std::vector<std::size_t> fusion_fc_widths;
};

struct TwinParams {
  std::vector<nn::LstmParams> forward;   // one per stacked layer
  std::vector<nn::LstmParams> backward;
};

class PatchRnnModel {
 public:
  /// Random initialization from config.seed; embedding tensors start as
  /// copies of the given tables.
  PatchRnnModel(ModelConfig config, const EmbeddingTable& code_table,
                const EmbeddingTable& message_table);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& code_vocabulary() const { return code_vocab_; }
  const Vocabulary& message_vocabulary() const { return message_vocab_; }

  EncodedSample encode(const PreparedPatch& prepared) const;
  EncodedSample encode(const PatchFile& patch) const;

  /// Full 1100 x 135 feature matrix of one side, from the current code
  /// embedding.
  CodeFeatureSequence code_features(const EncodedCode& code) const;

  /// Per-side summary: final forward and backward hidden states of every
  /// stacked layer (1 x layers*2*hidden).
  nn::Tensor twin_summary(nn::Tape& tape, const EncodedCode& code,
                          ForwardTrace* trace = nullptr) const;
  /// 1 x 64 code vector.
  nn::Tensor code_branch(nn::Tape& tape, const EncodedCode& unpatched,
                         const EncodedCode& patched,
                         ForwardTrace* trace = nullptr) const;
  /// 1 x 64 message vector.
  nn::Tensor message_branch(nn::Tape& tape, const std::vector<std::size_t>& ids,
                            std::size_t length,
                            ForwardTrace* trace = nullptr) const;
  /// 1 x 2 logits.
  nn::Tensor fuse(nn::Tape& tape, const nn::Tensor& code_vector,
                  const nn::Tensor& message_vector,
                  ForwardTrace* trace = nullptr) const;
  nn::Tensor forward(nn::Tape& tape, const EncodedSample& sample,
                     ForwardTrace* trace = nullptr) const;

  std::vector<double> probabilities(const EncodedSample& sample) const;
  Prediction predict(const EncodedSample& sample) const;
  Prediction predict(const PatchFile& patch) const;

  /// Every parameter tensor, embeddings included, in checkpoint order.
  std::vector<nn::Tensor> parameters() const;
  /// Parameters that receive gradients (embeddings only when trainable).
  std::vector<nn::Tensor> trainable_parameters() const;
  std::size_t parameter_count() const;

  const TwinParams& twin() const { return twin_; }
  const nn::LstmParams& message_forward() const { return msg_fwd_; }
  const nn::LstmParams& message_backward() const { return msg_bwd_; }
  const nn::DenseStack& code_fc() const { return code_fc_; }
  const nn::DenseStack& message_fc() const { return msg_fc_; }
  const nn::DenseStack& fusion_fc() const { return fusion_fc_; }
  const nn::Tensor& code_embedding() const { return code_emb_; }
  const nn::Tensor& message_embedding() const { return msg_emb_; }

  /// Deep copy with independent parameter storage.
  PatchRnnModel clone() const;

  std::vector<NamedTensor> to_tensors() const;
  static PatchRnnModel from_tensors(const std::vector<NamedTensor>& tensors);
  std::string serialize() const;
  static PatchRnnModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static PatchRnnModel load(const std::filesystem::path& path);
  /// FNV-1a of the serialized checkpoint.
  std::string fingerprint() const;

 private:
  PatchRnnModel() = default;
  void apply_trainable_flag();

  ModelConfig config_;
  Vocabulary code_vocab_;
  Vocabulary message_vocab_;
  nn::Tensor code_emb_;
  nn::Tensor msg_emb_;
  TwinParams twin_;
  nn::DenseStack code_fc_;
  nn::LstmParams msg_fwd_;
  nn::LstmParams msg_bwd_;
  nn::DenseStack msg_fc_;
  nn::DenseStack fusion_fc_;
};

}  // namespace patchrnn
