// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "patchrnn/embedding.hpp"
#include "patchrnn/errors.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn {
namespace {

using Corpus = std::vector<std::vector<std::string>>;

Corpus two_clusters(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back({"A", "B"});
    c.push_back({"C", "D"});
  }
  return c;
}

Corpus small_text() {
  return {{"fix", "buffer", "overflow", "in", "parser"},
          {"fix", "null", "pointer", "check"},
          {"add", "new", "option", "to", "parser"},
          {"update", "docs", "for", "option"}};
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(Embedding, ShapeAndSpecialRows) {
  Word2VecConfig cfg;
  cfg.epochs = 2;
  EmbeddingTable t = train_embeddings(small_text(), cfg);
  EXPECT_EQ(t.dim(), 128u);
  EXPECT_EQ(t.data().size(), t.size() * 128);
  for (std::size_t r = 0; r < t.size(); ++r) {
    ASSERT_EQ(t.row(r).size(), 128u);
    for (double v : t.row(r)) ASSERT_TRUE(std::isfinite(v));
  }
  for (double v : t.lookup("<pad>")) EXPECT_EQ(v, 0.0);
  auto unk = t.lookup("<unk>");
  auto missing = t.lookup("never-seen");
  EXPECT_TRUE(std::equal(unk.begin(), unk.end(), missing.begin(), missing.end()));
  EXPECT_GT(norm(unk), 0.0);
  EXPECT_GT(norm(t.lookup("parser")), 0.0);
}

TEST(Embedding, PadNeverTrains) {
  Corpus c = small_text();
  for (auto& s : c) s.insert(s.begin() + 1, "<pad>");
  Word2VecConfig cfg;
  cfg.dim = 8;
  EmbeddingTable t = train_embeddings(c, cfg);
  for (double v : t.lookup("<pad>")) EXPECT_EQ(v, 0.0);
}

TEST(Embedding, EmptyCorpus) {
  Word2VecConfig cfg;
  EXPECT_THROW(train_embeddings({}, cfg), EmptyCorpus);
  EXPECT_THROW(train_embeddings({{"<pad>", "<pad>"}, {"lonely"}}, cfg), EmptyCorpus);
}

TEST(Embedding, ConfigValidation) {
  for (auto mutate : std::vector<void (*)(Word2VecConfig&)>{
           [](Word2VecConfig& c) { c.dim = 0; }, [](Word2VecConfig& c) { c.window = 0; },
           [](Word2VecConfig& c) { c.epochs = 0; },
           [](Word2VecConfig& c) { c.initial_lr = 0.0; }}) {
    Word2VecConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(), Error);
  }
  Word2VecConfig zero_neg;
  zero_neg.negative_samples = 0;
  EXPECT_NO_THROW(zero_neg.validate());
}

TEST(Embedding, DeterministicForSeed) {
  for (Word2VecMode mode : {Word2VecMode::kSkipGram, Word2VecMode::kCbow}) {
    Word2VecConfig cfg;
    cfg.mode = mode;
    cfg.dim = 16;
    cfg.seed = 99;
    EXPECT_EQ(train_embeddings(small_text(), cfg), train_embeddings(small_text(), cfg));
    Word2VecConfig other = cfg;
    other.seed = 100;
    EXPECT_FALSE(train_embeddings(small_text(), cfg) == train_embeddings(small_text(), other));
  }
}

TEST(Embedding, TwoClusterExample) {
  Word2VecConfig cfg;
  cfg.seed = 1;
  EmbeddingTable t = train_embeddings(two_clusters(10000), cfg);
  EXPECT_GT(cosine_similarity(t.lookup("A"), t.lookup("B")),
            cosine_similarity(t.lookup("A"), t.lookup("C")));
}

TEST(Embedding, TwoClusterOverTwentySeeds) {
  const Corpus corpus = two_clusters(10000);
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Word2VecConfig cfg;
    cfg.seed = seed;
    EmbeddingTable t = train_embeddings(corpus, cfg);
    const double within = cosine_similarity(t.lookup("A"), t.lookup("B"));
    const double cross = cosine_similarity(t.lookup("A"), t.lookup("C"));
    wins += within > cross;
  }
  EXPECT_GE(wins, 19);
}

TEST(Embedding, CbowAlsoSeparatesClusters) {
  Word2VecConfig cfg;
  cfg.mode = Word2VecMode::kCbow;
  cfg.dim = 32;
  EmbeddingTable t = train_embeddings(two_clusters(2000), cfg);
  EXPECT_GT(cosine_similarity(t.lookup("C"), t.lookup("D")),
            cosine_similarity(t.lookup("C"), t.lookup("B")));
}

TEST(Embedding, LossDoesNotRiseOverFirstEpochs) {
  Rng rng(4);
  Corpus corpus;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> s;
    const int topic = static_cast<int>(rng.below(4));
    for (int j = 0; j < 8; ++j) {
      s.push_back("t" + std::to_string(topic) + "_" + std::to_string(rng.below(6)));
    }
    corpus.push_back(s);
  }
  Word2VecConfig cfg;
  cfg.dim = 32;
  std::vector<double> losses;
  train_embeddings(corpus, cfg, &losses);
  ASSERT_EQ(losses.size(), cfg.epochs);
  for (std::size_t e = 1; e < 3; ++e) EXPECT_LE(losses[e], losses[e - 1] * 1.05);
}

TEST(Embedding, NegativeSamplingGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const std::size_t dim = 7;
    auto vec = [&] {
      std::vector<double> v(dim);
      for (double& x : v) x = rng.uniform(-0.8, 0.8);
      return v;
    };
    std::vector<double> input = vec(), positive = vec();
    std::vector<std::vector<double>> negatives = {vec(), vec(), vec()};
    auto loss = [&] {
      std::vector<std::span<const double>> ns(negatives.begin(), negatives.end());
      return sgns_objective(input, positive, ns).loss;
    };
    std::vector<std::span<const double>> ns(negatives.begin(), negatives.end());
    const SgnsResult r = sgns_objective(input, positive, ns);

    // Oracle loss: -log s(u.v) - sum log s(-u_k.v), written out directly.
    auto dot = [&](const std::vector<double>& a) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s += a[i] * input[i];
      return s;
    };
    double oracle = std::log1p(std::exp(-dot(positive)));
    for (const auto& n : negatives) oracle += std::log1p(std::exp(dot(n)));
    EXPECT_NEAR(r.loss, oracle, 1e-12);

    const double h = 1e-5;
    auto check = [&](std::vector<double>& target, const std::vector<double>& grad) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double saved = target[i];
        target[i] = saved + h;
        const double up = loss();
        target[i] = saved - h;
        const double down = loss();
        target[i] = saved;
        EXPECT_LT(testing::relative_error(grad[i], (up - down) / (2 * h)), 1e-4);
      }
    };
    check(input, r.d_input);
    check(positive, r.d_positive);
    for (std::size_t k = 0; k < negatives.size(); ++k) check(negatives[k], r.d_negatives[k]);
  }
}

TEST(Embedding, TextRoundTripIsExact) {
  Word2VecConfig cfg;
  cfg.dim = 5;
  EmbeddingTable t = train_embeddings(small_text(), cfg);
  const std::string text = t.to_text();
  EXPECT_EQ(text.substr(0, text.find('\n')), "w2v 5 " + std::to_string(t.size()));
  EXPECT_EQ(EmbeddingTable::from_text(text), t);
  const auto path = std::filesystem::temp_directory_path() / "patchrnn_emb_test.w2v";
  t.save(path);
  EXPECT_EQ(EmbeddingTable::load(path), t);
  std::filesystem::remove(path);
  EXPECT_THROW(EmbeddingTable::from_text("w2v 5 3\n<pad>\t0,0,0,0,0\n"), Error);
  EXPECT_THROW(EmbeddingTable::from_text("nope"), Error);
}

TEST(Embedding, CosineOracle) {
  std::vector<double> a{1, 0, 0}, b{0, 2, 0}, c{3, 0, 0};
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, c), 1.0);
}

}  // namespace
}  // namespace patchrnn
