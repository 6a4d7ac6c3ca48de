// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/model.hpp"

#include <nlohmann/json.hpp>

#include <map>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/nn/ops.hpp"

namespace patchrnn {

namespace {

using nn::Tensor;
using json = nlohmann::json;

constexpr std::size_t kTypeWidth = kTokenTypeDim + 1;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

EncodedCode encode_side(const std::vector<AbstractToken>& tokens,
                        const Vocabulary& vocab) {
  EncodedCode code;
  code.length = tokens.size();
  const std::size_t n = valid_length(tokens);
  code.ids.reserve(n);
  code.types.assign(n * kTypeWidth, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    code.ids.push_back(vocab.index_of(tokens[i].text));
    write_type_features(tokens[i],
                        std::span<double>(code.types).subspan(i * kTypeWidth,
                                                              kTypeWidth));
  }
  return code;
}

Tensor embedding_tensor(const EmbeddingTable& table, const std::string& name) {
  Tensor t = Tensor::from({table.size(), table.dim()}, table.data(), true);
  t.set_name(name);
  return t;
}

}  // namespace

PrepareOptions ModelConfig::prepare_options() const {
  PrepareOptions o;
  o.code_length = code_seq_len;
  o.message_length = msg_seq_len;
  o.include_all_languages = include_all_languages;
  return o;
}

void ModelConfig::validate() const {
  require(code_seq_len >= 1 && msg_seq_len >= 1,
          "sequence lengths must be positive");
  require(embed_dim >= 1 && lstm_hidden >= 1 && code_lstm_layers >= 1,
          "embed_dim, lstm_hidden and code_lstm_layers must be positive");
  require(batch_size >= 1, "batch_size must be positive");
  require(epochs >= 1, "epochs must be at least 1");
  require(lr > 0.0, "lr must be positive");
  require(security_weight > 0.0, "security_weight must be positive");
  require(code_fc_dims.size() >= 2 && msg_fc_dims.size() >= 2 &&
              fusion_fc_dims.size() >= 2,
          "each dense stack needs an input and an output width");
  const std::size_t summary = 2 * code_lstm_layers * 2 * lstm_hidden;
  require(code_fc_dims.front() == summary,
          "code_fc_dims must start at " + std::to_string(summary));
  require(msg_fc_dims.front() == 2 * lstm_hidden,
          "msg_fc_dims must start at " + std::to_string(2 * lstm_hidden));
  require(code_fc_dims.back() == msg_fc_dims.back(),
          "code and message branches must end at the same width");
  require(fusion_fc_dims.front() == code_fc_dims.back() + msg_fc_dims.back(),
          "fusion_fc_dims must start at the concatenated branch width");
  require(fusion_fc_dims.back() == 2, "fusion_fc_dims must end at 2");
  for (auto* dims : {&code_fc_dims, &msg_fc_dims, &fusion_fc_dims}) {
    for (std::size_t d : *dims) require(d >= 1, "dense widths must be positive");
  }
}

std::string ModelConfig::to_json() const {
  json j = {
      {"code_seq_len", code_seq_len},
      {"msg_seq_len", msg_seq_len},
      {"embed_dim", embed_dim},
      {"lstm_hidden", lstm_hidden},
      {"code_lstm_layers", code_lstm_layers},
      {"code_fc_dims", code_fc_dims},
      {"msg_fc_dims", msg_fc_dims},
      {"fusion_fc_dims", fusion_fc_dims},
      {"batch_size", batch_size},
      {"lr", lr},
      {"epochs", epochs},
      {"seed", seed},
      {"embedding_trainable", embedding_trainable},
      {"security_weight", security_weight},
      {"include_all_languages", include_all_languages},
  };
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  ModelConfig c;
  try {
    json j = json::parse(text);
    c.code_seq_len = j.at("code_seq_len").get<std::size_t>();
    c.msg_seq_len = j.at("msg_seq_len").get<std::size_t>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
    c.code_lstm_layers = j.at("code_lstm_layers").get<std::size_t>();
    c.code_fc_dims = j.at("code_fc_dims").get<std::vector<std::size_t>>();
    c.msg_fc_dims = j.at("msg_fc_dims").get<std::vector<std::size_t>>();
    c.fusion_fc_dims = j.at("fusion_fc_dims").get<std::vector<std::size_t>>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.embedding_trainable = j.at("embedding_trainable").get<bool>();
    c.security_weight = j.value("security_weight", 1.0);
    c.include_all_languages = j.value("include_all_languages", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

Prediction make_prediction(double security_probability) {
  Prediction p;
  p.probability = security_probability;
  p.label = security_probability >= 0.5 ? Label::kSecurity : Label::kNonSecurity;
  return p;
}

PatchRnnModel::PatchRnnModel(ModelConfig config, const EmbeddingTable& code_table,
                             const EmbeddingTable& message_table)
    : config_(std::move(config)),
      code_vocab_(code_table.vocabulary()),
      message_vocab_(message_table.vocabulary()) {
  config_.validate();
  if (code_table.dim() != config_.embed_dim ||
      message_table.dim() != config_.embed_dim) {
    throw DimensionMismatch("embedding tables must have dim " +
                            std::to_string(config_.embed_dim));
  }
  Rng rng(config_.seed);
  code_emb_ = embedding_tensor(code_table, "code_embedding");
  msg_emb_ = embedding_tensor(message_table, "message_embedding");
  const std::size_t h = config_.lstm_hidden;
  for (std::size_t l = 0; l < config_.code_lstm_layers; ++l) {
    const std::size_t in = l == 0 ? config_.code_feature_width() : 2 * h;
    const std::string base = "code_lstm.l" + std::to_string(l);
    twin_.forward.push_back(nn::LstmParams::create(in, h, rng, base + ".fwd"));
    twin_.backward.push_back(nn::LstmParams::create(in, h, rng, base + ".bwd"));
  }
  code_fc_ = nn::DenseStack::create(config_.code_fc_dims, rng, "code_fc");
  msg_fwd_ = nn::LstmParams::create(config_.embed_dim, h, rng, "msg_lstm.fwd");
  msg_bwd_ = nn::LstmParams::create(config_.embed_dim, h, rng, "msg_lstm.bwd");
  msg_fc_ = nn::DenseStack::create(config_.msg_fc_dims, rng, "msg_fc");
  fusion_fc_ = nn::DenseStack::create(config_.fusion_fc_dims, rng, "fusion_fc");
  apply_trainable_flag();
}

void PatchRnnModel::apply_trainable_flag() {
  code_emb_.set_requires_grad(config_.embedding_trainable);
  msg_emb_.set_requires_grad(config_.embedding_trainable);
}

EncodedSample PatchRnnModel::encode(const PreparedPatch& prepared) const {
  if (prepared.unpatched.size() != config_.code_seq_len ||
      prepared.patched.size() != config_.code_seq_len ||
      prepared.message.tokens.size() != config_.msg_seq_len) {
    throw DimensionMismatch("prepared patch lengths do not match the model");
  }
  EncodedSample s;
  s.unpatched = encode_side(prepared.unpatched, code_vocab_);
  s.patched = encode_side(prepared.patched, code_vocab_);
  s.message_length = prepared.message.tokens.size();
  const std::size_t n = prepared.message.valid_length();
  for (std::size_t i = 0; i < n; ++i) {
    s.message_ids.push_back(message_vocab_.index_of(prepared.message.tokens[i]));
  }
  return s;
}

EncodedSample PatchRnnModel::encode(const PatchFile& patch) const {
  EncodedSample s = encode(prepare_patch(patch, config_.prepare_options()));
  s.label = patch.label;
  return s;
}

CodeFeatureSequence PatchRnnModel::code_features(const EncodedCode& code) const {
  CodeFeatureSequence seq;
  seq.length = code.length;
  seq.width = config_.code_feature_width();
  seq.valid_length = code.ids.size();
  seq.values.assign(seq.length * seq.width, 0.0);
  const std::size_t dim = config_.embed_dim;
  auto table = code_emb_.values();
  std::span<double> all(seq.values);
  for (std::size_t i = 0; i < seq.length; ++i) {
    auto row = all.subspan(i * seq.width, seq.width);
    if (i < code.ids.size()) {
      auto emb = table.subspan(code.ids[i] * dim, dim);
      std::copy(emb.begin(), emb.end(), row.begin());
      std::copy_n(code.types.begin() + static_cast<std::ptrdiff_t>(i * kTypeWidth),
                  kTypeWidth, row.begin() + static_cast<std::ptrdiff_t>(dim));
    } else {
      write_type_features(pad_token(), row.subspan(dim));
    }
  }
  return seq;
}

Tensor PatchRnnModel::twin_summary(nn::Tape& tape, const EncodedCode& code,
                                   ForwardTrace* trace) const {
  const std::size_t L = code.ids.size();
  if (code.types.size() != L * kTypeWidth || L > code.length) {
    throw DimensionMismatch("encoded code side is inconsistent");
  }
  Tensor emb = nn::gather_rows(tape, code_emb_, code.ids);
  Tensor types = Tensor::from({L, kTypeWidth}, code.types);
  Tensor x = nn::concat_cols(tape, {emb, types});
  if (trace) {
    trace->code_sequence_length = code.length;
    trace->code_feature_width = x.cols();
    trace->code_layer_widths.clear();
  }
  std::vector<Tensor> finals;
  for (std::size_t l = 0; l < twin_.forward.size(); ++l) {
    nn::BiLstmRun run =
        nn::bilstm_forward(tape, twin_.forward[l], twin_.backward[l], x, L);
    finals.push_back(run.forward.final_h);
    finals.push_back(run.backward.final_h);
    if (trace) trace->code_layer_widths.push_back(run.outputs.cols());
    x = run.outputs;
  }
  Tensor summary = nn::concat_cols(tape, finals);
  if (trace) trace->twin_summary_width = summary.cols();
  return summary;
}

Tensor PatchRnnModel::code_branch(nn::Tape& tape, const EncodedCode& unpatched,
                                  const EncodedCode& patched,
                                  ForwardTrace* trace) const {
  Tensor a = twin_summary(tape, unpatched, trace);
  Tensor b = twin_summary(tape, patched, trace);
  Tensor cat = nn::concat_cols(tape, {a, b});
  if (trace) {
    trace->twin_concat_width = cat.cols();
    trace->code_fc_widths.clear();
  }
  return code_fc_.forward(tape, cat, trace ? &trace->code_fc_widths : nullptr);
}

Tensor PatchRnnModel::message_branch(nn::Tape& tape,
                                     const std::vector<std::size_t>& ids,
                                     std::size_t length,
                                     ForwardTrace* trace) const {
  if (ids.size() > length) {
    throw DimensionMismatch("message valid prefix exceeds its length");
  }
  Tensor x = nn::gather_rows(tape, msg_emb_, ids);
  nn::BiLstmRun run = nn::bilstm_forward(tape, msg_fwd_, msg_bwd_, x, ids.size());
  Tensor summary =
      nn::concat_cols(tape, {run.forward.final_h, run.backward.final_h});
  if (trace) {
    trace->message_sequence_length = length;
    trace->message_embedding_width = x.cols();
    trace->message_summary_width = summary.cols();
    trace->message_fc_widths.clear();
  }
  return msg_fc_.forward(tape, summary,
                         trace ? &trace->message_fc_widths : nullptr);
}

Tensor PatchRnnModel::fuse(nn::Tape& tape, const Tensor& code_vector,
                           const Tensor& message_vector,
                           ForwardTrace* trace) const {
  Tensor cat = nn::concat_cols(tape, {code_vector, message_vector});
  if (trace) {
    trace->fusion_input_width = cat.cols();
    trace->fusion_fc_widths.clear();
  }
  return fusion_fc_.forward(tape, cat,
                            trace ? &trace->fusion_fc_widths : nullptr);
}

Tensor PatchRnnModel::forward(nn::Tape& tape, const EncodedSample& sample,
                              ForwardTrace* trace) const {
  Tensor code = code_branch(tape, sample.unpatched, sample.patched, trace);
  Tensor msg =
      message_branch(tape, sample.message_ids, sample.message_length, trace);
  return fuse(tape, code, msg, trace);
}

std::vector<double> PatchRnnModel::probabilities(const EncodedSample& sample) const {
  nn::Tape tape;
  Tensor logits = forward(tape, sample);
  return nn::softmax(logits.values());
}

Prediction PatchRnnModel::predict(const EncodedSample& sample) const {
  return make_prediction(probabilities(sample)[1]);
}

Prediction PatchRnnModel::predict(const PatchFile& patch) const {
  return predict(encode(patch));
}

std::vector<Tensor> PatchRnnModel::parameters() const {
  std::vector<Tensor> out{code_emb_, msg_emb_};
  auto append = [&out](const std::vector<Tensor>& ts) {
    out.insert(out.end(), ts.begin(), ts.end());
  };
  for (std::size_t l = 0; l < twin_.forward.size(); ++l) {
    append(twin_.forward[l].tensors());
    append(twin_.backward[l].tensors());
  }
  append(code_fc_.tensors());
  append(msg_fwd_.tensors());
  append(msg_bwd_.tensors());
  append(msg_fc_.tensors());
  append(fusion_fc_.tensors());
  return out;
}

std::vector<Tensor> PatchRnnModel::trainable_parameters() const {
  std::vector<Tensor> out;
  for (const Tensor& t : parameters()) {
    if (t.requires_grad()) out.push_back(t);
  }
  return out;
}

std::size_t PatchRnnModel::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : parameters()) n += t.size();
  return n;
}

PatchRnnModel PatchRnnModel::clone() const { return from_tensors(to_tensors()); }

std::vector<NamedTensor> PatchRnnModel::to_tensors() const {
  std::vector<NamedTensor> out;
  out.push_back(text_tensor("meta/config", config_.to_json()));
  out.push_back(text_tensor("meta/code_vocab", code_vocab_.to_text()));
  out.push_back(text_tensor("meta/message_vocab", message_vocab_.to_text()));
  for (const Tensor& t : parameters()) {
    auto v = t.values();
    out.push_back({t.name(), t.shape(), std::vector<double>(v.begin(), v.end())});
  }
  return out;
}

PatchRnnModel PatchRnnModel::from_tensors(const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const NamedTensor& t : tensors) {
    if (!by_name.emplace(t.name, &t).second) {
      throw CheckpointError("duplicate tensor '" + t.name + "'");
    }
  }
  auto meta = [&](const std::string& name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError("missing " + name);
    return tensor_text(*it->second);
  };
  ModelConfig config;
  Vocabulary code_vocab, msg_vocab;
  try {
    config = ModelConfig::from_json(meta("meta/config"));
    code_vocab = Vocabulary::from_text(meta("meta/code_vocab"));
    msg_vocab = Vocabulary::from_text(meta("meta/message_vocab"));
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("bad checkpoint metadata: ") + e.what());
  }
  const std::size_t dim = config.embed_dim;
  PatchRnnModel model(
      config,
      EmbeddingTable(code_vocab, dim, std::vector<double>(code_vocab.size() * dim)),
      EmbeddingTable(msg_vocab, dim, std::vector<double>(msg_vocab.size() * dim)));
  std::size_t used = 3;
  for (Tensor t : model.parameters()) {
    auto it = by_name.find(t.name());
    if (it == by_name.end()) throw CheckpointError("missing tensor " + t.name());
    if (it->second->shape != t.shape()) {
      throw CheckpointError("tensor " + t.name() + " has shape " +
                            nn::shape_string(it->second->shape) + ", expected " +
                            nn::shape_string(t.shape()));
    }
    std::copy(it->second->values.begin(), it->second->values.end(),
              t.values().begin());
    ++used;
  }
  if (used != tensors.size()) {
    throw CheckpointError("checkpoint has unexpected tensors");
  }
  return model;
}

std::string PatchRnnModel::serialize() const {
  return encode_checkpoint(to_tensors());
}

PatchRnnModel PatchRnnModel::deserialize(std::string_view bytes) {
  return from_tensors(decode_checkpoint(bytes));
}

void PatchRnnModel::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

PatchRnnModel PatchRnnModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

std::string PatchRnnModel::fingerprint() const { return fnv1a_hex(serialize()); }

}  // namespace patchrnn
