#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dpcipi/embed.hpp"
#include "dpcipi/seqio.hpp"

namespace dpcipi {

// Generated corpus whose titer is a fixed function of the Hamming distance
// between the two strains of a pair.
struct SyntheticOptions {
  std::size_t pairs = 500;
  std::size_t length = 150;
  std::size_t positive_min = 1;  // distance range for titer >= 40
  std::size_t positive_max = 4;
  std::size_t negative_min = 12;
  std::size_t negative_max = 16;
  std::size_t strain_drift = 15;  // mutations separating each reference from the base sequence
  std::size_t test_every = 5;     // every n-th pair is dated into the test split
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<NucleotideSequence> sequences;
  std::vector<HiRecord> records;
  std::vector<std::size_t> distances;  // per record
};

/// 10 * 2^(10 - d), floored at 10.
double synthetic_titer(std::size_t distance);

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options = {});

/// All 4^k k-mers as a shared offset vector (+-0.02 per component) plus
/// uniform [-0.05, 0.05] noise. Like real pretrained tables the vectors are
/// not centred, so pooled sequence vectors align more as sequences grow.
EmbeddingTable synthetic_table(std::size_t k, std::size_t dim, std::uint64_t seed);

/// CSV with the reference_name,test_name,hi_titer header.
void write_hi_csv(std::ostream& out, const std::vector<HiRecord>& records);

}  // namespace dpcipi
