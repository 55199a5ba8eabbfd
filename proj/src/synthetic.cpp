#include "dpcipi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace dpcipi {

namespace {

constexpr char kBases[] = {'A', 'C', 'G', 'T'};

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

// Changes exactly `count` distinct positions to a different base.
void mutate(std::string& s, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> positions(s.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(positions[i], positions[uniform(rng, i, positions.size() - 1)]);
    char& c = s[positions[i]];
    const char old = c;
    do {
      c = kBases[rng() % 4];
    } while (c == old);
  }
}

}  // namespace

double synthetic_titer(std::size_t distance) {
  return std::max(10.0, 10.0 * std::ldexp(1.0, 10 - static_cast<int>(distance)));
}

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& o) {
  if (o.positive_min > o.positive_max || o.negative_min > o.negative_max || o.negative_max > o.length ||
      o.strain_drift > o.length || o.test_every == 0)
    throw std::invalid_argument("inconsistent synthetic corpus options");
  std::mt19937_64 rng(o.seed);
  std::string base(o.length, 'A');
  for (char& c : base) c = kBases[rng() % 4];

  SyntheticCorpus corpus;
  for (std::size_t i = 0; i < o.pairs; ++i) {
    const bool positive = i % 2 == 0;
    const std::size_t d = positive ? uniform(rng, o.positive_min, o.positive_max)
                                   : uniform(rng, o.negative_min, o.negative_max);
    std::string ref = base;
    mutate(ref, o.strain_drift, rng);
    std::string test = ref;
    mutate(test, d, rng);

    const bool held_out = (i + 1) % o.test_every == 0;
    const std::string id = std::to_string(i + 1);
    NucleotideSequence r{"A/SYNTH/R" + id + "/1980", "SR" + id, ref};
    NucleotideSequence t{"A/SYNTH/T" + id + (held_out ? "/1996" : "/1981"), "ST" + id, test};
    corpus.records.push_back({r.name, t.name, synthetic_titer(d)});
    corpus.distances.push_back(d);
    corpus.sequences.push_back(std::move(r));
    corpus.sequences.push_back(std::move(t));
  }
  return corpus;
}

EmbeddingTable synthetic_table(std::size_t k, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> offset(dim);
  for (double& c : offset) c = rng() % 2 ? 0.02 : -0.02;
  EmbeddingTable table(k, dim, "synthetic");
  std::vector<double> v(dim);
  for (const auto& token : canonical_kmers(k)) {
    for (std::size_t j = 0; j < dim; ++j) v[j] = offset[j] + noise(rng);
    table.add(token, v);
  }
  return table;
}

void write_hi_csv(std::ostream& out, const std::vector<HiRecord>& records) {
  out << "reference_name,test_name,hi_titer\n";
  for (const auto& r : records) out << r.reference_name << ',' << r.test_name << ',' << r.titer << '\n';
}

}  // namespace dpcipi
