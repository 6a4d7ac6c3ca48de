// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// -log(sigmoid(x)) without overflow for large |x|.
double softplus_neg(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

class NegativeSampler {
 public:
  explicit NegativeSampler(const Vocabulary& vocab) {
    cumulative_.assign(vocab.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 2; i < vocab.size(); ++i) {
      total += std::pow(static_cast<double>(vocab.frequency(i)), 0.75);
      cumulative_[i] = total;
    }
    total_ = total;
  }

  std::size_t draw(Rng& rng) const {
    const double r = rng.uniform() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx, cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// One negative-sampling update for input vector `in` against `target`.
// Output rows move immediately; the input gradient accumulates into `work`.
double sgns_update(const double* in, std::size_t target,
                   std::vector<double>& syn1, std::size_t dim,
                   const NegativeSampler& sampler, std::size_t negatives,
                   double lr, Rng& rng, std::vector<double>& work) {
  double loss = 0.0;
  for (std::size_t d = 0; d <= negatives; ++d) {
    std::size_t out;
    double label;
    if (d == 0) {
      out = target;
      label = 1.0;
    } else {
      out = sampler.draw(rng);
      if (out == target) continue;
      label = 0.0;
    }
    double* u = syn1.data() + out * dim;
    const double score = dot(in, u, dim);
    loss += label > 0 ? softplus_neg(score) : softplus_neg(-score);
    const double g = (label - sigmoid(score)) * lr;
    for (std::size_t k = 0; k < dim; ++k) work[k] += g * u[k];
    for (std::size_t k = 0; k < dim; ++k) u[k] += g * in[k];
  }
  return loss;
}

}  // namespace

void Word2VecConfig::validate() const {
  if (dim == 0 || window == 0 || epochs == 0) {
    throw Error("word2vec config needs dim, window and epochs >= 1");
  }
  if (!(initial_lr > 0.0)) throw Error("word2vec learning rate must be > 0");
}

EmbeddingTable::EmbeddingTable(Vocabulary vocab, std::size_t dim,
                               std::vector<double> vectors)
    : vocab_(std::move(vocab)), dim_(dim), vectors_(std::move(vectors)) {
  if (vectors_.size() != vocab_.size() * dim_) {
    throw DimensionMismatch("embedding table needs " +
                            std::to_string(vocab_.size() * dim_) +
                            " values, got " + std::to_string(vectors_.size()));
  }
}

std::span<const double> EmbeddingTable::row(std::size_t index) const {
  return std::span<const double>(vectors_).subspan(index * dim_, dim_);
}

std::span<const double> EmbeddingTable::lookup(std::string_view token) const {
  return row(vocab_.index_of(token));
}

std::string EmbeddingTable::to_text() const {
  std::string out = "w2v " + std::to_string(dim_) + " " +
                    std::to_string(vocab_.size()) + "\n";
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    out += vocab_.token(i);
    out += '\t';
    auto r = row(i);
    for (std::size_t k = 0; k < dim_; ++k) {
      if (k) out += ',';
      out += format_double(r[k]);
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable EmbeddingTable::from_text(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw Error("empty embedding file");
  auto header = split(lines[0], ' ');
  if (header.size() != 3 || header[0] != "w2v") {
    throw Error("bad embedding header");
  }
  const auto dim = static_cast<std::size_t>(parse_double(header[1]));
  const auto rows = static_cast<std::size_t>(parse_double(header[2]));
  if (lines.size() != rows + 1) {
    throw Error("embedding file declares " + std::to_string(rows) +
                " rows, has " + std::to_string(lines.size() - 1));
  }
  std::vector<std::string> tokens;
  std::vector<double> values;
  values.reserve(rows * dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tab = lines[i].rfind('\t');
    if (tab == std::string_view::npos) {
      throw Error("bad embedding line " + std::to_string(i + 1));
    }
    tokens.emplace_back(lines[i].substr(0, tab));
    auto fields = split(lines[i].substr(tab + 1), ',');
    if (fields.size() != dim) {
      throw Error("embedding line " + std::to_string(i + 1) + " has " +
                  std::to_string(fields.size()) + " components");
    }
    for (auto f : fields) values.push_back(parse_double(f));
  }
  return EmbeddingTable(Vocabulary::from_tokens(tokens), dim, std::move(values));
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  write_file(path, to_text());
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

EmbeddingTable train_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                const Word2VecConfig& config,
                                std::vector<double>* epoch_losses) {
  config.validate();
  Vocabulary vocab = Vocabulary::build(corpus, config.min_count);
  const std::size_t dim = config.dim;
  const std::size_t V = vocab.size();

  std::vector<std::vector<std::size_t>> sentences;
  std::size_t total_words = 0;
  for (const auto& seq : corpus) {
    std::vector<std::size_t> ids;
    for (const auto& tok : seq) {
      std::size_t id = vocab.index_of(tok);
      if (id >= 2) ids.push_back(id);
    }
    total_words += ids.size();
    if (ids.size() >= 2) sentences.push_back(std::move(ids));
  }
  if (sentences.empty()) throw EmptyCorpus();

  Rng rng(config.seed);
  std::vector<double> syn0(V * dim, 0.0);
  std::vector<double> syn1(V * dim, 0.0);
  for (std::size_t i = 2 * dim; i < syn0.size(); ++i) {
    syn0[i] = (rng.uniform() - 0.5) / static_cast<double>(dim);
  }
  NegativeSampler sampler(vocab);

  std::vector<double> work(dim);
  std::vector<double> hidden(dim);
  std::vector<char> trained(V, 0);
  const double budget = static_cast<double>(config.epochs * total_words);
  std::size_t processed = 0;
  if (epoch_losses) epoch_losses->clear();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t pairs = 0;
    for (const auto& sent : sentences) {
      const std::size_t n = sent.size();
      for (std::size_t pos = 0; pos < n; ++pos, ++processed) {
        const double lr =
            config.initial_lr *
            std::max(1e-4, 1.0 - static_cast<double>(processed) / budget);
        const std::size_t shrink = rng.below(config.window);
        const std::size_t reach = config.window - shrink;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(n - 1, pos + reach);
        const std::size_t center = sent[pos];
        if (config.mode == Word2VecMode::kSkipGram) {
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            const std::size_t ctx = sent[c];
            double* in = syn0.data() + ctx * dim;
            std::fill(work.begin(), work.end(), 0.0);
            loss += sgns_update(in, center, syn1, dim, sampler,
                                config.negative_samples, lr, rng, work);
            for (std::size_t k = 0; k < dim; ++k) in[k] += work[k];
            trained[ctx] = 1;
            ++pairs;
          }
        } else {
          std::fill(hidden.begin(), hidden.end(), 0.0);
          std::size_t count = 0;
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            const double* in = syn0.data() + sent[c] * dim;
            for (std::size_t k = 0; k < dim; ++k) hidden[k] += in[k];
            ++count;
          }
          if (count == 0) continue;
          for (double& h : hidden) h /= static_cast<double>(count);
          std::fill(work.begin(), work.end(), 0.0);
          loss += sgns_update(hidden.data(), center, syn1, dim, sampler,
                              config.negative_samples, lr, rng, work);
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            double* in = syn0.data() + sent[c] * dim;
            for (std::size_t k = 0; k < dim; ++k) {
              in[k] += work[k] / static_cast<double>(count);
            }
            trained[sent[c]] = 1;
          }
          ++pairs;
        }
      }
    }
    if (epoch_losses) {
      epoch_losses->push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    }
  }

  // "<unk>" has no occurrences of its own: give it the mean trained vector.
  std::size_t n_trained = 0;
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 2; i < V; ++i) {
    if (!trained[i]) continue;
    ++n_trained;
    for (std::size_t k = 0; k < dim; ++k) mean[k] += syn0[i * dim + k];
  }
  if (n_trained) {
    for (std::size_t k = 0; k < dim; ++k) {
      syn0[Vocabulary::kUnknownIndex * dim + k] =
          mean[k] / static_cast<double>(n_trained);
    }
  }
  return EmbeddingTable(std::move(vocab), dim, std::move(syn0));
}

SgnsResult sgns_objective(std::span<const double> input,
                          std::span<const double> positive,
                          const std::vector<std::span<const double>>& negatives) {
  const std::size_t dim = input.size();
  if (positive.size() != dim) throw DimensionMismatch("sgns: positive size");
  SgnsResult r;
  r.d_input.assign(dim, 0.0);
  auto term = [&](std::span<const double> u, double label,
                  std::vector<double>& du) {
    if (u.size() != dim) throw DimensionMismatch("sgns: negative size");
    const double s = dot(input.data(), u.data(), dim);
    r.loss += label > 0 ? softplus_neg(s) : softplus_neg(-s);
    const double g = sigmoid(s) - label;
    du.assign(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      r.d_input[k] += g * u[k];
      du[k] = g * input[k];
    }
  };
  term(positive, 1.0, r.d_positive);
  r.d_negatives.resize(negatives.size());
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    term(negatives[i], 0.0, r.d_negatives[i]);
  }
  return r;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a.data(), a.data(), a.size()));
  const double nb = std::sqrt(dot(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a.data(), b.data(), a.size()) / (na * nb);
}

}  // namespace patchrnn
