// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>

#include "patchrnn/errors.hpp"
#include "patchrnn/nn/ops.hpp"

namespace patchrnn {

namespace {

int label_index(const EncodedSample& s) {
  if (!s.label) throw Error("training sample without a label");
  return *s.label == Label::kSecurity ? 1 : 0;
}

void check_dataset(const std::vector<EncodedSample>& samples) {
  if (samples.empty()) throw EmptyDataset();
  bool seen[2] = {false, false};
  for (const auto& s : samples) seen[label_index(s)] = true;
  if (!seen[0] || !seen[1]) throw SingleClassDataset();
}

}  // namespace

std::string TrainingHistory::to_json() const {
  nlohmann::json epochs_json = nlohmann::json::array();
  for (const EpochRecord& e : epochs) {
    nlohmann::json row = {{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"train_accuracy", e.train_accuracy}};
    if (e.validation_loss) row["validation_loss"] = *e.validation_loss;
    if (e.validation_accuracy) row["validation_accuracy"] = *e.validation_accuracy;
    epochs_json.push_back(row);
  }
  nlohmann::json j = {{"initial_loss", initial_loss}, {"epochs", epochs_json}};
  if (best_epoch) j["best_epoch"] = *best_epoch;
  return j.dump(2);
}

LossAndAccuracy measure(const PatchRnnModel& model,
                        const std::vector<EncodedSample>& samples) {
  LossAndAccuracy out;
  if (samples.empty()) return out;
  std::size_t correct = 0;
  for (const EncodedSample& s : samples) {
    const int y = label_index(s);
    auto p = model.probabilities(s);
    out.loss += -std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
    if ((p[1] >= 0.5 ? 1 : 0) == y) ++correct;
  }
  const auto n = static_cast<double>(samples.size());
  out.loss /= n;
  out.accuracy = static_cast<double>(correct) / n;
  return out;
}

TrainingHistory train(PatchRnnModel& model,
                      const std::vector<EncodedSample>& samples,
                      const TrainOptions& options) {
  check_dataset(samples);
  const ModelConfig& cfg = model.config();
  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  nn::Adam adam(model.trainable_parameters(), adam_cfg);
  Rng rng(cfg.seed ^ 0x5deece66dULL);

  TrainingHistory history;
  history.initial_loss = measure(model, samples).loss;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::vector<nn::Tensor> all_params = model.parameters();
  std::vector<std::vector<double>> best_values;
  double best_accuracy = -1.0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const auto batch = static_cast<double>(end - start);
      adam.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const EncodedSample& s = samples[order[k]];
        const int y = label_index(s);
        const double w = y == 1 ? cfg.security_weight : 1.0;
        nn::Tape tape;
        nn::Tensor logits = model.forward(tape, s);
        std::vector<double> probs;
        nn::Tensor loss = nn::softmax_cross_entropy(
            tape, logits, std::span<const int>(&y, 1),
            std::span<const double>(&w, 1), batch, &probs);
        tape.backward(loss);
        loss_sum += -std::log(std::max(probs[static_cast<std::size_t>(y)], 1e-300));
        if ((probs[1] >= 0.5 ? 1 : 0) == y) ++correct;
      }
      for (const nn::Tensor& p : model.trainable_parameters()) {
        nn::check_finite(p.grad_or_empty(), "gradient of " + p.name());
      }
      adam.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(samples.size());
    rec.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(samples.size());
    if (options.holdout && !options.holdout->empty()) {
      LossAndAccuracy v = measure(model, *options.holdout);
      rec.validation_loss = v.loss;
      rec.validation_accuracy = v.accuracy;
      if (v.accuracy > best_accuracy) {
        best_accuracy = v.accuracy;
        history.best_epoch = epoch;
        best_values.clear();
        for (const nn::Tensor& p : all_params) {
          best_values.emplace_back(p.values().begin(), p.values().end());
        }
      }
    }
    history.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (options.stop_after && options.stop_after(rec)) break;
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < all_params.size(); ++i) {
      nn::Tensor p = all_params[i];
      std::copy(best_values[i].begin(), best_values[i].end(), p.values().begin());
    }
  }
  adam.zero_grad();
  return history;
}

std::vector<std::vector<std::string>> code_corpus(
    const std::vector<PreparedPatch>& patches) {
  std::vector<std::vector<std::string>> out;
  for (const PreparedPatch& p : patches) {
    for (const auto* side : {&p.unpatched, &p.patched}) {
      std::vector<std::string> sentence;
      for (const AbstractToken& t : *side) {
        if (!t.is_pad()) sentence.push_back(t.text);
      }
      out.push_back(std::move(sentence));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> message_corpus(
    const std::vector<PreparedPatch>& patches) {
  std::vector<std::vector<std::string>> out;
  for (const PreparedPatch& p : patches) {
    const std::size_t n = p.message.valid_length();
    out.emplace_back(p.message.tokens.begin(),
                     p.message.tokens.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

EmbeddingTable embed_corpus(const std::vector<std::vector<std::string>>& corpus,
                            const Word2VecConfig& w2v) {
  try {
    return train_embeddings(corpus, w2v);
  } catch (const EmptyCorpus&) {
    Vocabulary vocab = Vocabulary::build(corpus, w2v.min_count);
    return EmbeddingTable(vocab, w2v.dim,
                          std::vector<double>(vocab.size() * w2v.dim, 0.0));
  }
}

PatchRnnModel build_model(const std::vector<PreparedPatch>& patches,
                          const ModelConfig& config, const Word2VecConfig& w2v) {
  Word2VecConfig wc = w2v;
  wc.dim = config.embed_dim;
  EmbeddingTable code = embed_corpus(code_corpus(patches), wc);
  EmbeddingTable msg = embed_corpus(message_corpus(patches), wc);
  return PatchRnnModel(config, code, msg);
}

}  // namespace patchrnn
