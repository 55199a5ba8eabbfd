#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dpcipi/seqio.hpp"

namespace dpcipi {

// Start position of every strain on the coordinate system of the longest
// ("template") sequence.
struct OffsetMap {
  std::string template_name;
  std::string template_bases;
  std::map<std::string, std::size_t> offsets;

  std::size_t at(const std::string& name) const;
  bool contains(const std::string& name) const { return offsets.contains(name); }
};

nlohmann::ordered_json to_json(const OffsetMap& m);
OffsetMap offset_map_from_json(const nlohmann::json& j);

/// Number of positions j < min(|a|,|b|) with a[j] == b[j].
std::size_t common_sites_length(std::string_view a, std::string_view b);

/// Offset in [0, |tmpl|-|s|] with the most common sites against tmpl[i:].
/// Ties go to the largest offset. Returns 0 when s is not shorter than tmpl.
std::size_t find_start_position(std::string_view s, std::string_view tmpl);

/// Template is the longest sequence, first in input order on ties.
OffsetMap align_sequences(std::span<const NucleotideSequence> seqs);

enum class DistanceRule {
  hamming_with_overhang,  // overlap mismatches + positions covered by one strain only
  overlap_hamming,        // overlap mismatches only
};

std::size_t aligned_distance(const NucleotideSequence& r, const NucleotideSequence& t,
                             const OffsetMap& offsets,
                             DistanceRule rule = DistanceRule::hamming_with_overhang);

/// d / ((|r|+|t|)/2). Larger values mean more divergent strains.
double similarity(const NucleotideSequence& r, const NucleotideSequence& t, const OffsetMap& offsets,
                  DistanceRule rule = DistanceRule::hamming_with_overhang);

}  // namespace dpcipi
