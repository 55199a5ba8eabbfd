#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dpcipi/align.hpp"
#include "dpcipi/embed.hpp"
#include "dpcipi/kmer.hpp"
#include "dpcipi/synthetic.hpp"
#include "dpcipi/nn/network.hpp"

namespace fixture {

// A 2-mer table over {A,C,G,T} with wider-than-default random values.
inline dpcipi::EmbeddingTable tiny_table(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dpcipi::EmbeddingTable t(2, dim, "fixture");
  std::vector<double> v(dim);
  for (const auto& tok : dpcipi::canonical_kmers(2)) {
    for (auto& x : v) x = u(rng);
    t.add(tok, v);
  }
  return t;
}

inline dpcipi::KmerSequence random_tokens(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  static const std::vector<std::string> pool = [] {
    auto p = dpcipi::canonical_kmers(2);
    p.push_back("NN");  // exercises the OOV path
    return p;
  }();
  dpcipi::KmerSequence s{"s", {}, 2};
  const std::size_t n = min_len + rng() % (max_len - min_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(pool[rng() % pool.size()]);
  return s;
}

struct TinyProblem {
  dpcipi::EmbeddingTable table;
  dpcipi::nn::Network net;
  std::vector<dpcipi::nn::PairExample> batch;
};

inline TinyProblem tiny_problem(dpcipi::nn::NetworkSpec spec, std::uint64_t seed, std::size_t examples = 3,
                                std::size_t min_len = 1, std::size_t max_len = 5) {
  std::mt19937_64 rng(seed);
  TinyProblem p{tiny_table(spec.input_dim, seed), {}, {}};
  p.net = dpcipi::nn::make_network(spec, p.table.size());
  dpcipi::nn::initialize(p.net, seed + 1);
  if (spec.train_embeddings) p.net.embedding = p.table.vectors();
  for (std::size_t i = 0; i < examples; ++i)
    p.batch.push_back(dpcipi::nn::make_example(p.table, random_tokens(rng, min_len, max_len),
                                               random_tokens(rng, min_len, max_len), rng() % spec.classes));
  return p;
}

struct SyntheticSplit {
  std::vector<dpcipi::PreprocessedPair> train;
  std::vector<dpcipi::PreprocessedPair> test;
};

inline SyntheticSplit synthetic_split(const dpcipi::SyntheticOptions& options, std::size_t k = 6) {
  const auto corpus = dpcipi::make_synthetic_corpus(options);
  const auto dataset = dpcipi::build_dataset(corpus.records, corpus.sequences);
  const auto offsets = dpcipi::align_sequences(corpus.sequences);
  SyntheticSplit out;
  for (auto& p : dpcipi::preprocess_pairs(dataset, offsets, {k}))
    (p.split == dpcipi::Split::train ? out.train : out.test).push_back(std::move(p));
  return out;
}

}  // namespace fixture
