#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dpcipi/embed.hpp"
#include "dpcipi/error.hpp"

namespace dpcipi {
namespace {

EmbeddingTable table2(std::initializer_list<std::pair<std::string, std::vector<double>>> rows) {
  EmbeddingTable t(2, rows.begin()->second.size());
  for (const auto& [tok, v] : rows) t.add(tok, v);
  return t;
}

TEST(ParseTable, HeaderAndRows) {
  std::istringstream in("k=6\tdim=4\tcount=2\nACGTAC\t1 2 3 4\nTTTTTT\t0.5 -1 1e-3 0\n");
  const auto t = parse_table(in);
  EXPECT_EQ(t.k(), 6u);
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_DOUBLE_EQ(t.vector(*t.index_of("TTTTTT"))(2), 1e-3);
  EXPECT_FALSE(t.contains("AAAAAA"));
}

TEST(ParseTable, DimMismatchNamesToken) {
  std::istringstream in("k=6\tdim=4\tcount=1\nACGTAC\t1 2 3\n");
  try {
    parse_table(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("ACGTAC"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseTable, Errors) {
  std::istringstream dup("k=2\tdim=1\tcount=2\nAC\t1\nAC\t2\n");
  EXPECT_THROW(parse_table(dup), InputError);
  std::istringstream count("k=2\tdim=1\tcount=3\nAC\t1\nAG\t2\n");
  EXPECT_THROW(parse_table(count), InputError);
  std::istringstream header("dim=1\nAC\t1\n");
  EXPECT_THROW(parse_table(header), InputError);
  std::istringstream alphabet("k=2\tdim=1\tcount=1\nAN\t1\n");
  EXPECT_THROW(parse_table(alphabet), InputError);
  std::istringstream length("k=2\tdim=1\tcount=1\nACG\t1\n");
  EXPECT_THROW(parse_table(length), InputError);
  EXPECT_THROW(load_table("/nonexistent/table.tsv"), InputError);
}

TEST(WriteTable, ExactRoundTrip) {
  const auto t = random_table(3, 5, 99);
  std::stringstream ss;
  write_table(ss, t);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "k=3\tdim=5\tcount=64");
  const auto back = parse_table(ss);
  EXPECT_EQ(back.tokens(), t.tokens());
  EXPECT_TRUE(back.vectors() == t.vectors());
  std::stringstream again;
  write_table(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(RandomTable, ShapeRangeAndSeeding) {
  const auto a = random_table(2, 3, 7);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a.dim(), 3u);
  EXPECT_EQ(a.tokens().front(), "AA");
  EXPECT_EQ(a.tokens().back(), "TT");
  EXPECT_LE(a.vectors().maxCoeff(), 0.05);
  EXPECT_GE(a.vectors().minCoeff(), -0.05);
  EXPECT_TRUE(random_table(2, 3, 7).vectors() == a.vectors());
  EXPECT_FALSE(random_table(2, 3, 8).vectors() == a.vectors());
  EXPECT_EQ(random_table(6, 1, 1).size(), 4096u);
}

TEST(CanonicalKmers, Order) {
  const auto k1 = canonical_kmers(1);
  EXPECT_EQ(k1, (std::vector<std::string>{"A", "C", "G", "T"}));
  EXPECT_EQ(canonical_kmers(2)[4], "CA");
}

TEST(EmbedSequence, KnownTokens) {
  const auto t = table2({{"AA", {1, 2}}, {"CC", {3, 4}}});
  const auto e = embed_sequence(t, {"s", {"CC", "AA", "CC"}, 2});
  ASSERT_EQ(e.length(), 3u);
  EXPECT_EQ(e.rows(0, 0), 3);
  EXPECT_EQ(e.rows(1, 1), 2);
  EXPECT_EQ(e.rows(2, 1), 4);
}

TEST(EmbedSequence, OovAveragesKnownNeighbors) {
  const auto t = table2({{"AA", {1, 0}}, {"AC", {0, 1}}, {"AG", {1, 1}}, {"AT", {2, 0}}});
  const auto e = embed_sequence(t, {"s", {"AA", "AC", "NN", "AG", "AT"}, 2});
  EXPECT_DOUBLE_EQ(e.rows(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(e.rows(2, 1), 0.5);
  // Unknown neighbors and positions outside the sequence are excluded.
  const auto f = embed_sequence(t, {"s", {"NN", "GG", "AT"}, 2});
  EXPECT_DOUBLE_EQ(f.rows(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.rows(1, 0), 2.0);
  const auto g = embed_sequence(t, {"s", {"NN"}, 2});
  EXPECT_TRUE(g.rows.isZero());
  EXPECT_THROW(embed_sequence(t, {"s", {"AAA"}, 3}), std::invalid_argument);
}

TEST(EmbedSequence, PaddingIsSkipped) {
  const auto t = table2({{"AA", {1, 0}}});
  EXPECT_EQ(embed_sequence(t, {"s", {"##", "AA"}, 2}).length(), 1u);
}

TEST(EmbedSequence, OovLocality) {
  const auto t = random_table(2, 3, 4);
  std::mt19937_64 rng(8);
  const std::vector<std::string> pool{"AA", "AC", "NN", "GT", "NA", "TT"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> tokens(1 + rng() % 10);
    for (auto& x : tokens) x = pool[rng() % pool.size()];
    auto changed = tokens;
    const std::size_t j = rng() % tokens.size();
    changed[j] = pool[rng() % pool.size()];
    const auto a = embed_sequence(t, {"s", tokens, 2});
    const auto b = embed_sequence(t, {"s", changed, 2});
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i + 2 >= j && i <= j + 2) continue;
      EXPECT_TRUE(a.rows.row(static_cast<Eigen::Index>(i)) == b.rows.row(static_cast<Eigen::Index>(i)));
    }
  }
}

TEST(GsePool, Examples) {
  SequenceEmbedding single{Eigen::MatrixXd{{1.5, -2}}, 2};
  EXPECT_TRUE(gse_pool(single).isApprox(Eigen::Vector2d(1.5, -2)));
  SequenceEmbedding two{Eigen::MatrixXd{{0, 2}, {2, 0}}, 2};
  EXPECT_TRUE(gse_pool(two).isApprox(Eigen::Vector2d(1, 1)));
  SequenceEmbedding empty{Eigen::MatrixXd(0, 3), 3};
  EXPECT_EQ(gse_pool(empty).size(), 3);
  EXPECT_TRUE(gse_pool(empty).isZero());
  SequenceEmbedding doubled{Eigen::MatrixXd(4, 2), 2};
  doubled.rows << two.rows, two.rows;
  EXPECT_TRUE(gse_pool(doubled).isApprox(gse_pool(two)));
}

TEST(Plan, MaterializeMatchesEmbed) {
  const auto t = random_table(2, 4, 12);
  const KmerSequence s{"s", {"AC", "NN", "NN", "NN", "NN", "NN", "TA"}, 2};
  const auto plan = plan_embedding(t, s);
  const auto e = materialize(t.vectors(), plan);
  EXPECT_TRUE(e.rows == embed_sequence(t, s).rows);
  EXPECT_TRUE(plan.rows[3].terms.empty());
}

TEST(VocabularyHash, DependsOnTokens) {
  EXPECT_EQ(random_table(2, 3, 1).vocabulary_hash(), random_table(2, 3, 2).vocabulary_hash());
  EXPECT_NE(random_table(2, 3, 1).vocabulary_hash(), random_table(2, 4, 1).vocabulary_hash());
  EXPECT_NE(random_table(2, 3, 1).vocabulary_hash(), random_table(3, 3, 1).vocabulary_hash());
}

}  // namespace
}  // namespace dpcipi
