#include "dpcipi/seqio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dpcipi/error.hpp"

namespace dpcipi {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A trailing newline produces one empty line that is not part of the data.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    auto end = line.find(',', start);
    if (end == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, end - start)));
    start = end + 1;
  }
  return cells;
}

}  // namespace

bool is_nucleotide(char c) {
  return c == 'A' || c == 'C' || c == 'G' || c == 'T' || c == 'N';
}

std::vector<NucleotideSequence> parse_fasta(std::string_view text) {
  std::vector<NucleotideSequence> out;
  std::unordered_set<std::string> names;
  std::size_t header_line = 0;

  auto finish = [&]() {
    if (out.empty()) return;
    if (out.back().bases.empty())
      throw ParseError("empty sequence body for '" + out.back().name + "'", header_line);
  };

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '>') {
      finish();
      auto header = line.substr(1);
      auto bar = header.find('|');
      if (bar == std::string_view::npos || bar == 0 || bar + 1 >= header.size())
        throw ParseError("malformed header, expected '>name|accession'", lineno);
      NucleotideSequence seq;
      seq.name = std::string(trim(header.substr(0, bar)));
      seq.accession = std::string(trim(header.substr(bar + 1)));
      if (seq.name.empty() || seq.accession.empty())
        throw ParseError("malformed header, expected '>name|accession'", lineno);
      if (!names.insert(seq.name).second)
        throw ParseError("duplicate sequence name '" + seq.name + "'", lineno);
      out.push_back(std::move(seq));
      header_line = lineno;
      continue;
    }
    if (out.empty()) throw ParseError("sequence data before first header", lineno);
    auto& bases = out.back().bases;
    for (char raw : line) {
      const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
      if (!is_nucleotide(c))
        throw ParseError(std::string("invalid nucleotide '") + raw + "'", lineno);
      bases.push_back(c);
    }
  }
  finish();
  return out;
}

void write_fasta(std::ostream& out, std::span<const NucleotideSequence> seqs) {
  constexpr std::size_t kWidth = 70;
  for (const auto& s : seqs) {
    out << '>' << s.name << '|' << s.accession << '\n';
    for (std::size_t i = 0; i < s.bases.size(); i += kWidth)
      out << std::string_view(s.bases).substr(i, kWidth) << '\n';
  }
}

HiTable parse_hi_table(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw FormatError("HI table is empty");

  const auto header = split_csv(lines[0]);
  auto column = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw FormatError("HI table is missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ref_col = column("reference_name");
  const std::size_t test_col = column("test_name");
  const std::size_t titer_col = column("hi_titer");
  const std::size_t needed = std::max({ref_col, test_col, titer_col}) + 1;

  HiTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cells = split_csv(lines[i]);
    if (cells.size() < needed)
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()),
                       i + 1);
    const auto titer_text = cells[titer_col];
    if (titer_text.empty()) {
      ++table.skipped;
      continue;
    }
    double titer = 0.0;
    auto [ptr, ec] = std::from_chars(titer_text.data(), titer_text.data() + titer_text.size(), titer);
    if (ec != std::errc() || ptr != titer_text.data() + titer_text.size() || !std::isfinite(titer))
      throw ParseError("row " + std::to_string(i) + ": non-numeric titer '" + std::string(titer_text) + "'",
                       i + 1);
    if (titer <= 0.0 || titer > kMaxTiter)
      throw ParseError("row " + std::to_string(i) + ": titer out of range (0, 10240]: " +
                           std::string(titer_text),
                       i + 1);
    if (cells[ref_col].empty() || cells[test_col].empty())
      throw ParseError("row " + std::to_string(i) + ": empty strain name", i + 1);
    table.records.push_back({std::string(cells[ref_col]), std::string(cells[test_col]), titer});
  }
  return table;
}

int strain_year(std::string_view name) {
  auto slash = name.rfind('/');
  if (slash == std::string_view::npos)
    throw InputError("cannot extract year from strain name '" + std::string(name) + "'");
  auto field = trim(name.substr(slash + 1));
  const bool digits = !field.empty() && std::all_of(field.begin(), field.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
  if (!digits || (field.size() != 2 && field.size() != 4))
    throw InputError("cannot extract year from strain name '" + std::string(name) + "'");
  int year = 0;
  std::from_chars(field.data(), field.data() + field.size(), year);
  return field.size() == 2 ? 1900 + year : year;
}

int binary_label(double titer) { return titer >= kPositiveTiterThreshold ? 1 : 0; }

int level_label(double titer) {
  if (titer < 40.0) return 0;
  if (titer < 100.0) return 1;
  if (titer < 1000.0) return 2;
  return 3;
}

std::vector<VirusPair> build_dataset(std::span<const HiRecord> records,
                                     std::span<const NucleotideSequence> sequences) {
  std::unordered_map<std::string_view, const NucleotideSequence*> by_name;
  for (const auto& s : sequences) by_name.emplace(s.name, &s);

  std::vector<std::string> missing;
  std::unordered_set<std::string> seen_missing;
  for (const auto& r : records) {
    for (const auto& name : {r.reference_name, r.test_name}) {
      if (!by_name.contains(name) && seen_missing.insert(name).second) missing.push_back(name);
    }
  }
  if (!missing.empty()) {
    std::string msg = "unresolved strain names:";
    for (const auto& m : missing) msg += " '" + m + "'";
    throw LinkageError(msg);
  }

  std::vector<VirusPair> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) {
    VirusPair p;
    p.reference = *by_name.at(r.reference_name);
    p.test = *by_name.at(r.test_name);
    p.titer = r.titer;
    p.binary_label = binary_label(r.titer);
    p.level_label = level_label(r.titer);
    const int year = std::max(strain_year(r.reference_name), strain_year(r.test_name));
    p.split = year >= kTestSplitYear ? Split::test : Split::train;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::string_view to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw FormatError("unknown split '" + std::string(s) + "'");
}

void write_dataset_jsonl(std::ostream& out, std::span<const VirusPair> pairs) {
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["reference"] = {{"name", p.reference.name},
                      {"accession", p.reference.accession},
                      {"bases", p.reference.bases}};
    j["test"] = {{"name", p.test.name}, {"accession", p.test.accession}, {"bases", p.test.bases}};
    j["titer"] = p.titer;
    j["binary_label"] = p.binary_label;
    j["level_label"] = p.level_label;
    j["split"] = to_string(p.split);
    out << j.dump() << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dpcipi
