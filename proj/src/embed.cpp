#include "dpcipi/embed.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dpcipi/error.hpp"

namespace dpcipi {

namespace {

bool is_canonical_base(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Parses "key=value" header fields separated by arbitrary whitespace.
std::size_t header_field(const std::string& header, std::string_view key) {
  std::istringstream ss(header);
  std::string field;
  while (ss >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos || std::string_view(field).substr(0, eq) != key) continue;
    std::size_t value = 0;
    const char* begin = field.data() + eq + 1;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end)
      throw ParseError("bad header field '" + field + "'", 1);
    return value;
  }
  throw ParseError("header is missing '" + std::string(key) + "='", 1);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t k, std::size_t dim, std::string source)
    : k_(k), dim_(dim), source_(std::move(source)) {
  if (k == 0 || dim == 0) throw std::invalid_argument("embedding table needs positive k and dim");
}

void EmbeddingTable::add(const std::string& token, std::span<const double> vector) {
  if (vector.size() != dim_)
    throw FormatError("token '" + token + "' has " + std::to_string(vector.size()) +
                      " components, expected dim=" + std::to_string(dim_));
  if (token.size() != k_ || !std::all_of(token.begin(), token.end(), is_canonical_base))
    throw FormatError("token '" + token + "' is not a " + std::to_string(k_) + "-mer over ACGT");
  if (!index_.emplace(token, tokens_.size()).second) throw FormatError("duplicate token '" + token + "'");
  tokens_.push_back(token);
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingTable::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable::ConstRows EmbeddingTable::vectors() const {
  return ConstRows(data_.data(), static_cast<Eigen::Index>(tokens_.size()), static_cast<Eigen::Index>(dim_));
}

EmbeddingTable::Rows EmbeddingTable::mutable_vectors() {
  return Rows(data_.data(), static_cast<Eigen::Index>(tokens_.size()), static_cast<Eigen::Index>(dim_));
}

Eigen::VectorXd EmbeddingTable::vector(std::size_t index) const {
  return vectors().row(static_cast<Eigen::Index>(index)).transpose();
}

std::uint64_t EmbeddingTable::vocabulary_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, std::to_string(k_) + ":" + std::to_string(dim_) + ":");
  for (const auto& t : tokens_) h = fnv1a(h, t + "\n");
  return h;
}

EmbeddingTable parse_table(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("embedding table is empty", 1);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::size_t k = header_field(header, "k");
  const std::size_t dim = header_field(header, "dim");
  const std::size_t count = header_field(header, "count");
  if (k == 0 || dim == 0) throw ParseError("k and dim must be positive", 1);

  EmbeddingTable table(k, dim, "pretrained");
  std::vector<double> values;
  values.reserve(dim);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    const char* tok_end = p;
    while (tok_end < end && *tok_end != '\t' && *tok_end != ' ') ++tok_end;
    std::string token(p, tok_end);
    for (auto& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    values.clear();
    p = tok_end;
    for (;;) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ParseError("non-numeric component for token '" + token + "'", lineno);
      values.push_back(v);
      p = next;
    }
    try {
      table.add(token, values);
    } catch (const FormatError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (table.size() != count)
    throw FormatError("header declares count=" + std::to_string(count) + " but " +
                      std::to_string(table.size()) + " rows were read");
  return table;
}

EmbeddingTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding table '" + path + "'");
  return parse_table(in);
}

void write_table(std::ostream& out, const EmbeddingTable& table) {
  out << "k=" << table.k() << "\tdim=" << table.dim() << "\tcount=" << table.size() << '\n';
  const auto rows = table.vectors();
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens()[i] << '\t';
    for (std::size_t j = 0; j < table.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

std::vector<std::string> canonical_kmers(std::size_t k) {
  static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 4;
  std::vector<std::string> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::string kmer(k, 'A');
    std::size_t c = code;
    for (std::size_t i = k; i-- > 0;) {
      kmer[i] = kBases[c & 3U];
      c >>= 2;
    }
    out.push_back(std::move(kmer));
  }
  return out;
}

EmbeddingTable random_table(std::size_t k, std::size_t dim, std::uint64_t seed) {
  EmbeddingTable table(k, dim, "random(" + std::to_string(seed) + ")");
  std::mt19937_64 rng(seed);
  std::vector<double> v(dim);
  for (const auto& token : canonical_kmers(k)) {
    for (auto& x : v) {
      // 53 random mantissa bits -> [0,1), independent of the library's distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x = -0.05 + 0.1 * u;
    }
    table.add(token, v);
  }
  return table;
}

EmbeddingPlan plan_embedding(const EmbeddingTable& table, const KmerSequence& s) {
  if (s.k != table.k())
    throw std::invalid_argument("k-mer size " + std::to_string(s.k) + " does not match table k=" +
                                std::to_string(table.k()));
  std::vector<std::optional<std::size_t>> known;
  known.reserve(s.tokens.size());
  for (const auto& tok : s.tokens)
    if (!is_padding(tok)) known.push_back(table.index_of(tok));

  EmbeddingPlan plan;
  plan.rows.resize(known.size());
  const auto n = static_cast<std::ptrdiff_t>(known.size());
  const auto w = static_cast<std::ptrdiff_t>(kOovWindow);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& row = plan.rows[static_cast<std::size_t>(i)];
    if (known[static_cast<std::size_t>(i)]) {
      row.terms.emplace_back(*known[static_cast<std::size_t>(i)], 1.0);
      continue;
    }
    std::vector<std::size_t> neighbors;
    for (std::ptrdiff_t j = i - w; j <= i + w; ++j) {
      if (j == i || j < 0 || j >= n) continue;
      if (known[static_cast<std::size_t>(j)]) neighbors.push_back(*known[static_cast<std::size_t>(j)]);
    }
    for (auto idx : neighbors) row.terms.emplace_back(idx, 1.0 / static_cast<double>(neighbors.size()));
  }
  return plan;
}

SequenceEmbedding materialize(const Eigen::Ref<const RowMatrix>& vectors, const EmbeddingPlan& plan) {
  SequenceEmbedding e;
  e.dim = static_cast<std::size_t>(vectors.cols());
  e.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(plan.rows.size()), vectors.cols());
  for (std::size_t i = 0; i < plan.rows.size(); ++i) {
    for (const auto& [idx, weight] : plan.rows[i].terms)
      e.rows.row(static_cast<Eigen::Index>(i)) += weight * vectors.row(static_cast<Eigen::Index>(idx));
  }
  return e;
}

SequenceEmbedding embed_sequence(const EmbeddingTable& table, const KmerSequence& s) {
  return materialize(table.vectors(), plan_embedding(table, s));
}

Eigen::VectorXd gse_pool(const SequenceEmbedding& e) {
  if (e.length() == 0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.dim));
  return e.rows.colwise().mean().transpose();
}

}  // namespace dpcipi
