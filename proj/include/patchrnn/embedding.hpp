// SPDX-License-Identifier: Apache-2.0
//
// word2vec with negative sampling (skip-gram or CBOW) and the resulting
// token -> vector table.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchrnn/vocabulary.hpp"

namespace patchrnn {

enum class Word2VecMode { kSkipGram, kCbow };

struct Word2VecConfig {
  std::size_t dim = 128;
  std::size_t window = 5;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double initial_lr = 0.025;
  std::size_t min_count = 1;
  Word2VecMode mode = Word2VecMode::kSkipGram;
  std::uint64_t seed = 1;

  /// Throws Error on dim, window or epochs of zero.
  void validate() const;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  /// `vectors` is row-major, vocab.size() x dim.
  EmbeddingTable(Vocabulary vocab, std::size_t dim, std::vector<double> vectors);

  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }
  const std::vector<double>& data() const { return vectors_; }

  std::span<const double> row(std::size_t index) const;
  /// Unknown tokens get the "<unk>" row, "<pad>" the zero row.
  std::span<const double> lookup(std::string_view token) const;

  /// `w2v <dim> <vocab_size>` header, then `token<TAB>v1,v2,...` per row.
  std::string to_text() const;
  static EmbeddingTable from_text(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

  bool operator==(const EmbeddingTable& other) const {
    return dim_ == other.dim_ && vocab_.tokens() == other.vocab_.tokens() &&
           vectors_ == other.vectors_;
  }

 private:
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::vector<double> vectors_;
};

/// Trains on `corpus`; "<pad>" and "<unk>" occurrences are skipped as both
/// centre and context. Mean pair loss per epoch goes to `epoch_losses` when
/// given. Throws EmptyCorpus when there is nothing to train on.
EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                const Word2VecConfig& config,
                                std::vector<double>* epoch_losses = nullptr);

/// Negative-sampling loss for one (input, positive output, negative outputs)
/// triple: -log s(u_o.v) - sum_k log s(-u_k.v), with its gradients.
struct SgnsResult {
  double loss = 0.0;
  std::vector<double> d_input;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

SgnsResult sgns_objective(std::span<const double> input,
                          std::span<const double> positive,
                          const std::vector<std::span<const double>>& negatives);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace patchrnn
