#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpcipi {

inline constexpr double kPositiveTiterThreshold = 40.0;
inline constexpr double kMaxTiter = 10240.0;
inline constexpr int kTestSplitYear = 1995;

struct NucleotideSequence {
  std::string name;
  std::string accession;
  std::string bases;  // uppercase over {A,C,G,T,N}

  friend bool operator==(const NucleotideSequence&, const NucleotideSequence&) = default;
};

struct HiRecord {
  std::string reference_name;
  std::string test_name;
  double titer = 0.0;
};

struct HiTable {
  std::vector<HiRecord> records;
  std::size_t skipped = 0;  // rows with an empty titer cell
};

enum class Split { train, test };

struct VirusPair {
  NucleotideSequence reference;
  NucleotideSequence test;
  double titer = 0.0;
  int binary_label = 0;
  int level_label = 0;
  Split split = Split::train;
};

bool is_nucleotide(char c);

/// Parses FASTA with `>name|accession` headers. Bases are uppercased and
/// multi-line bodies joined. Names must be unique.
std::vector<NucleotideSequence> parse_fasta(std::string_view text);
void write_fasta(std::ostream& out, std::span<const NucleotideSequence> seqs);

/// CSV with (at least) the columns reference_name,test_name,hi_titer.
HiTable parse_hi_table(std::string_view text);

/// Year encoded in the last '/'-separated field of a strain name. Two-digit
/// years are 19YY.
int strain_year(std::string_view name);

int binary_label(double titer);
int level_label(double titer);

std::vector<VirusPair> build_dataset(std::span<const HiRecord> records,
                                     std::span<const NucleotideSequence> sequences);

std::string_view to_string(Split split);
Split split_from_string(std::string_view s);

/// One JSON object per line, every VirusPair field included.
void write_dataset_jsonl(std::ostream& out, std::span<const VirusPair> pairs);

std::string read_file(const std::string& path);

}  // namespace dpcipi
