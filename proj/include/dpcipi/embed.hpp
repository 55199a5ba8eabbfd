#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpcipi/kmer.hpp"

namespace dpcipi {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Static k-mer -> vector lookup. Rows are stored densely in insertion order.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t k, std::size_t dim, std::string source = "pretrained");

  std::size_t k() const { return k_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const std::string& source() const { return source_; }

  void add(const std::string& token, std::span<const double> vector);
  std::optional<std::size_t> index_of(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.contains(token); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  using ConstRows = Eigen::Map<const RowMatrix>;
  using Rows = Eigen::Map<RowMatrix>;
  ConstRows vectors() const;
  Rows mutable_vectors();
  Eigen::VectorXd vector(std::size_t index) const;

  /// FNV-1a over k, dim and the ordered token list.
  std::uint64_t vocabulary_hash() const;

 private:
  std::size_t k_ = 0;
  std::size_t dim_ = 0;
  std::string source_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

EmbeddingTable parse_table(std::istream& in);
EmbeddingTable load_table(const std::string& path);
/// Header `k=K\tdim=D\tcount=N`, then `TOKEN\tv1 v2 ... vD` with round-trip precision.
void write_table(std::ostream& out, const EmbeddingTable& table);

/// Every k-mer over {A,C,G,T}, lexicographic in A<C<G<T order.
std::vector<std::string> canonical_kmers(std::size_t k);

/// All 4^k canonical k-mers with i.i.d. uniform values in [-0.05, 0.05].
EmbeddingTable random_table(std::size_t k, std::size_t dim, std::uint64_t seed);

// One embedded row expressed as a weighted sum of table rows. Empty terms
// encode the zero vector.
struct RowMix {
  std::vector<std::pair<std::size_t, double>> terms;
};

// How a token sequence maps onto table rows; materialize() yields the
// SequenceEmbedding and the same plan routes gradients back to the table.
struct EmbeddingPlan {
  std::vector<RowMix> rows;
};

inline constexpr std::size_t kOovWindow = 2;

/// Known tokens map to their row. An unknown token at i averages the known
/// tokens at i-2, i-1, i+1, i+2; no known neighbor gives the zero vector.
/// Padding tokens are skipped.
EmbeddingPlan plan_embedding(const EmbeddingTable& table, const KmerSequence& s);

struct SequenceEmbedding {
  Eigen::MatrixXd rows;  // T x dim
  std::size_t dim = 0;

  std::size_t length() const { return static_cast<std::size_t>(rows.rows()); }
};

SequenceEmbedding materialize(const Eigen::Ref<const RowMatrix>& vectors, const EmbeddingPlan& plan);
SequenceEmbedding embed_sequence(const EmbeddingTable& table, const KmerSequence& s);

/// Mean of the rows; zero vector of length dim when empty.
Eigen::VectorXd gse_pool(const SequenceEmbedding& e);

}  // namespace dpcipi
