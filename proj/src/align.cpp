#include "dpcipi/align.hpp"

#include <algorithm>

#include "dpcipi/error.hpp"

namespace dpcipi {

std::size_t OffsetMap::at(const std::string& name) const {
  auto it = offsets.find(name);
  if (it == offsets.end()) throw LinkageError("strain '" + name + "' has no alignment offset");
  return it->second;
}

nlohmann::ordered_json to_json(const OffsetMap& m) {
  nlohmann::ordered_json j;
  j["template_name"] = m.template_name;
  j["template_bases"] = m.template_bases;
  nlohmann::ordered_json offs = nlohmann::ordered_json::object();
  for (const auto& [name, d] : m.offsets) offs[name] = d;
  j["offsets"] = std::move(offs);
  return j;
}

OffsetMap offset_map_from_json(const nlohmann::json& j) {
  try {
    OffsetMap m;
    m.template_name = j.at("template_name").get<std::string>();
    m.template_bases = j.value("template_bases", std::string{});
    for (const auto& [name, d] : j.at("offsets").items()) m.offsets[name] = d.get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed offsets file: ") + e.what());
  }
}

std::size_t common_sites_length(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) count += a[j] == b[j] ? 1 : 0;
  return count;
}

std::size_t find_start_position(std::string_view s, std::string_view tmpl) {
  if (s.size() >= tmpl.size()) return 0;
  const std::size_t span = tmpl.size() - s.size();
  std::size_t best = 0;
  std::size_t best_offset = 0;
  for (std::size_t i = 0; i <= span; ++i) {
    const std::size_t c = common_sites_length(s, tmpl.substr(i));
    if (best <= c) {
      best = c;
      best_offset = i;
    }
  }
  return best_offset;
}

OffsetMap align_sequences(std::span<const NucleotideSequence> seqs) {
  if (seqs.empty()) throw InputError("cannot align an empty sequence collection");
  const NucleotideSequence* longest = &seqs.front();
  for (const auto& s : seqs)
    if (s.bases.size() > longest->bases.size()) longest = &s;

  OffsetMap m;
  m.template_name = longest->name;
  m.template_bases = longest->bases;
  for (const auto& s : seqs) m.offsets[s.name] = find_start_position(s.bases, longest->bases);
  m.offsets[longest->name] = 0;
  return m;
}

std::size_t aligned_distance(const NucleotideSequence& r, const NucleotideSequence& t,
                             const OffsetMap& offsets, DistanceRule rule) {
  const std::size_t r0 = offsets.at(r.name), t0 = offsets.at(t.name);
  const std::size_t r1 = r0 + r.bases.size(), t1 = t0 + t.bases.size();
  const std::size_t lo = std::max(r0, t0), hi = std::min(r1, t1);

  std::size_t mismatches = 0, overlap = 0;
  for (std::size_t pos = lo; pos < hi; ++pos) {
    mismatches += r.bases[pos - r0] != t.bases[pos - t0] ? 1 : 0;
    ++overlap;
  }
  if (rule == DistanceRule::overlap_hamming) return mismatches;
  const std::size_t single = r.bases.size() + t.bases.size() - 2 * overlap;
  return mismatches + single;
}

double similarity(const NucleotideSequence& r, const NucleotideSequence& t, const OffsetMap& offsets,
                  DistanceRule rule) {
  const double mean_length = (static_cast<double>(r.bases.size()) + static_cast<double>(t.bases.size())) / 2.0;
  const auto d = aligned_distance(r, t, offsets, rule);
  if (mean_length <= 0.0) throw InputError("similarity of two empty sequences is undefined");
  return static_cast<double>(d) / mean_length;
}

}  // namespace dpcipi
