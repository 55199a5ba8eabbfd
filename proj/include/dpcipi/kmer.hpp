#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpcipi/align.hpp"
#include "dpcipi/seqio.hpp"

namespace dpcipi {

inline constexpr std::size_t kDefaultK = 6;

struct KmerSequence {
  std::string strain_name;
  std::vector<std::string> tokens;
  std::size_t k = kDefaultK;
};

std::string padding_token(std::size_t k);
bool is_padding(const std::string& token);

KmerSequence segment(const NucleotideSequence& seq, std::size_t k);

using TokenLists = std::pair<std::vector<std::string>, std::vector<std::string>>;

/// Left-pads each token list with one padding token per base of alignment offset.
TokenLists align_and_fill_pair(const KmerSequence& r, const KmerSequence& t, const OffsetMap& offsets);

enum class TailMode {
  keep,      // tokens past the shorter padded list survive
  truncate,  // cut both lists to the shorter padded length first
};

/// Removes every k-mer that sits at the same aligned locus in both strains,
/// then drops padding. Survivors keep their relative order.
std::pair<KmerSequence, KmerSequence> deduplicate_pair(const KmerSequence& r, const KmerSequence& t,
                                                       const OffsetMap& offsets,
                                                       TailMode tail = TailMode::keep);

// One line of a preprocessed pair file.
struct PreprocessedPair {
  std::string reference_name;
  std::string test_name;
  std::vector<std::string> reference_tokens;
  std::vector<std::string> test_tokens;
  double titer = 0.0;
  double similarity = 0.0;  // alignment-based normalized distance
  int binary_label = 0;
  int level_label = 0;
  Split split = Split::train;
};

struct PreprocessOptions {
  std::size_t k = kDefaultK;
  TailMode tail = TailMode::keep;
  DistanceRule distance = DistanceRule::hamming_with_overhang;
};

std::vector<PreprocessedPair> preprocess_pairs(std::span<const VirusPair> pairs, const OffsetMap& offsets,
                                               const PreprocessOptions& options = {});

void write_pairs_jsonl(std::ostream& out, std::span<const PreprocessedPair> pairs);
std::vector<PreprocessedPair> read_pairs_jsonl(std::istream& in);

}  // namespace dpcipi
