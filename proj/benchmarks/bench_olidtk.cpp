// Microbenchmarks for the hot paths: text cleanup, vectorization and
// single-document prediction for each model family.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "olidtk/features.hpp"
#include "olidtk/forest.hpp"
#include "olidtk/linear.hpp"
#include "olidtk/lstm.hpp"
#include "olidtk/naive_bayes.hpp"
#include "olidtk/preprocess.hpp"
#include "olidtk/rng.hpp"
#include "olidtk/sampling.hpp"

namespace {

using namespace olidtk;

const std::string kRawTweet =
    "@USER @USER This is UNBELIEVABLE... #MakeAmericaGreatAgain these people "
    "can't be serious!!! 100% done with it \xF0\x9F\x98\x82\xF0\x9F\x98\x82 "
    "don't @ me";

// A small synthetic corpus with two separable token pools.
struct Fixture {
  EmojiMap emojis = EmojiMap::builtin();
  std::vector<TokenSeq> docs;
  std::vector<int> labels;
  Vocabulary vocab;
  FeatureDataset counts;   // sparse count rows
  FeatureDataset tfidf;    // sparse tf-idf rows
  SparseVector probe;
  NBModel nb;
  LinearModel svm;
  ForestModel forest;
  LstmModel lstm;
  PaddedSequence seq;

  Fixture() {
    static const std::vector<std::string> neutral = {
        "have a great day",   "the weather is lovely", "watching the game tonight",
        "coffee time again",  "this song is nice",     "see you at the park"};
    static const std::vector<std::string> offensive = {
        "you are a pathetic idiot", "what a disgusting loser", "these morons ruin everything",
        "shut up you awful clown",  "that crowd of traitors",  "stupid garbage take again"};
    Rng rng(17);
    for (int i = 0; i < 400; ++i) {
      const bool off = i % 2 == 1;
      const auto& pool = off ? offensive : neutral;
      docs.push_back(preprocess_pipeline(pool[rng.below(pool.size())], emojis));
      labels.push_back(off ? 1 : 0);
    }
    vocab = build_vocabulary(docs);
    counts.n_classes = tfidf.n_classes = 2;
    counts.labels = tfidf.labels = labels;
    for (const TokenSeq& d : docs) {
      counts.sparse_rows.push_back(count_vectorize(d, vocab));
      tfidf.sparse_rows.push_back(tfidf_vectorize(d, vocab));
    }
    probe = tfidf_vectorize(docs[1], vocab);

    nb = nb_train(counts);
    SvmParams sp;
    sp.epochs = 5;
    svm = svm_train(tfidf, sp, 3);
    ForestParams fp;
    fp.n_trees = 20;
    forest = forest_train(counts, fp, 3);

    LstmConfig lc;
    lc.vocab_size = vocab.size();
    lc.embed_dim = 32;
    lc.hidden_dim = 32;
    lc.dense_dim = 16;
    lc.max_len = 60;
    lc.seed = 3;
    lstm = lstm_init(lc);
    seq = encode_sequence(docs[1], vocab, lc.max_len);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_NormalizeTweet(benchmark::State& state) {
  const EmojiMap& emojis = fixture().emojis;
  for (auto _ : state) benchmark::DoNotOptimize(normalize(kRawTweet, emojis));
}
BENCHMARK(BM_NormalizeTweet);

void BM_PreprocessPipeline(benchmark::State& state) {
  const EmojiMap& emojis = fixture().emojis;
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_pipeline(kRawTweet, emojis));
}
BENCHMARK(BM_PreprocessPipeline);

void BM_CountVectorize(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(count_vectorize(f.docs[1], f.vocab));
}
BENCHMARK(BM_CountVectorize);

void BM_TfidfVectorize(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(tfidf_vectorize(f.docs[1], f.vocab));
}
BENCHMARK(BM_TfidfVectorize);

void BM_NaiveBayesPredict(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(nb_predict(f.nb, f.probe));
}
BENCHMARK(BM_NaiveBayesPredict);

void BM_LinearPredict(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(linear_predict(f.svm, f.probe));
}
BENCHMARK(BM_LinearPredict);

void BM_ForestPredict(benchmark::State& state) {
  Fixture& f = fixture();
  RowRef x{&f.probe, nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(forest_predict(f.forest, x));
}
BENCHMARK(BM_ForestPredict);

void BM_LstmForward(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(lstm_forward(f.lstm, f.seq));
}
BENCHMARK(BM_LstmForward);

void BM_SmoteResample(benchmark::State& state) {
  FeatureDataset dense;
  dense.n_classes = 2;
  Rng rng(9);
  for (int i = 0; i < 120; ++i) {
    DenseVector x(16);
    for (int j = 0; j < 16; ++j) x(j) = rng.uniform01();
    dense.dense_rows.push_back(std::move(x));
    dense.labels.push_back(i < 90 ? 0 : 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(smote(dense, 5, 11));
}
BENCHMARK(BM_SmoteResample);

}  // namespace

BENCHMARK_MAIN();
