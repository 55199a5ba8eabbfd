#include "dpcipi/kmer.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "dpcipi/error.hpp"

namespace dpcipi {

std::string padding_token(std::size_t k) { return std::string(k, '#'); }

bool is_padding(const std::string& token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c == '#'; });
}

KmerSequence segment(const NucleotideSequence& seq, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (seq.bases.size() < k)
    throw InputError("sequence '" + seq.name + "' is shorter than k=" + std::to_string(k));
  KmerSequence out{seq.name, {}, k};
  out.tokens.reserve(seq.bases.size() - k + 1);
  for (std::size_t i = 0; i + k <= seq.bases.size(); ++i) out.tokens.push_back(seq.bases.substr(i, k));
  return out;
}

TokenLists align_and_fill_pair(const KmerSequence& r, const KmerSequence& t, const OffsetMap& offsets) {
  auto fill = [&](const KmerSequence& s) {
    const std::size_t d = offsets.at(s.strain_name);
    std::vector<std::string> out(d, padding_token(s.k));
    out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
  };
  return {fill(r), fill(t)};
}

std::pair<KmerSequence, KmerSequence> deduplicate_pair(const KmerSequence& r, const KmerSequence& t,
                                                       const OffsetMap& offsets, TailMode tail) {
  auto [m, n] = align_and_fill_pair(r, t, offsets);
  const std::size_t l = std::min(m.size(), n.size());
  if (tail == TailMode::truncate) {
    m.resize(l);
    n.resize(l);
  }

  std::vector<bool> common(l, false);
  for (std::size_t i = 0; i < l; ++i) common[i] = m[i] == n[i];

  auto strip = [&](const std::vector<std::string>& padded, const KmerSequence& src) {
    KmerSequence out{src.strain_name, {}, src.k};
    for (std::size_t i = 0; i < padded.size(); ++i) {
      if (i < l && common[i]) continue;
      if (is_padding(padded[i])) continue;
      out.tokens.push_back(padded[i]);
    }
    return out;
  };
  return {strip(m, r), strip(n, t)};
}

std::vector<PreprocessedPair> preprocess_pairs(std::span<const VirusPair> pairs, const OffsetMap& offsets,
                                               const PreprocessOptions& options) {
  std::vector<PreprocessedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto r = segment(p.reference, options.k);
    const auto t = segment(p.test, options.k);
    auto [rd, td] = deduplicate_pair(r, t, offsets, options.tail);
    PreprocessedPair pp;
    pp.reference_name = p.reference.name;
    pp.test_name = p.test.name;
    pp.reference_tokens = std::move(rd.tokens);
    pp.test_tokens = std::move(td.tokens);
    pp.titer = p.titer;
    pp.similarity = similarity(p.reference, p.test, offsets, options.distance);
    pp.binary_label = p.binary_label;
    pp.level_label = p.level_label;
    pp.split = p.split;
    out.push_back(std::move(pp));
  }
  return out;
}

void write_pairs_jsonl(std::ostream& out, std::span<const PreprocessedPair> pairs) {
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["reference_name"] = p.reference_name;
    j["test_name"] = p.test_name;
    j["reference_tokens"] = p.reference_tokens;
    j["test_tokens"] = p.test_tokens;
    j["titer"] = p.titer;
    j["similarity"] = p.similarity;
    j["binary_label"] = p.binary_label;
    j["level_label"] = p.level_label;
    j["split"] = to_string(p.split);
    out << j.dump() << '\n';
  }
}

std::vector<PreprocessedPair> read_pairs_jsonl(std::istream& in) {
  std::vector<PreprocessedPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PreprocessedPair p;
      p.reference_name = j.value("reference_name", std::string{});
      p.test_name = j.value("test_name", std::string{});
      p.reference_tokens = j.at("reference_tokens").get<std::vector<std::string>>();
      p.test_tokens = j.at("test_tokens").get<std::vector<std::string>>();
      p.titer = j.value("titer", 0.0);
      p.similarity = j.value("similarity", 0.0);
      p.binary_label = j.at("binary_label").get<int>();
      p.level_label = j.at("level_label").get<int>();
      p.split = split_from_string(j.at("split").get<std::string>());
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed pair record: ") + e.what(), lineno);
    }
  }
  return out;
}

}  // namespace dpcipi
