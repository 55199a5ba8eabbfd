#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dpcipi/nn/adam.hpp"
#include "dpcipi/nn/lstm.hpp"
#include "dpcipi/nn/mlp.hpp"
#include "dpcipi/nn/network.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace dpcipi::nn {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

BiLstmParams random_bilstm(std::size_t in, std::size_t h, std::uint64_t seed) {
  std::srand(static_cast<unsigned>(seed));
  auto p = make_bilstm(in, h);
  for (auto* l : {&p.forward, &p.backward}) {
    l->w_input.setRandom();
    l->w_recurrent.setRandom();
    l->bias.setRandom();
  }
  return p;
}

TEST(Lstm, MatchesScalarOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = random_bilstm(5, 3, seed);
    MatrixXd rows = MatrixXd::Random(1 + seed % 6, 5);
    EXPECT_TRUE(bilstm_encode(p, rows).isApprox(oracle::bilstm_final(p, rows), 1e-12));
  }
}

TEST(Lstm, MeanPoolingAveragesStates) {
  const auto p = random_bilstm(4, 2, 3);
  MatrixXd rows = MatrixXd::Random(5, 4);
  const auto fwd = oracle::lstm_states(p.forward, rows, false);
  const auto bwd = oracle::lstm_states(p.backward, rows, true);
  VectorXd want = VectorXd::Zero(4);
  for (std::size_t t = 0; t < 5; ++t) {
    want.head(2) += fwd[t] / 5.0;
    want.tail(2) += bwd[t] / 5.0;
  }
  EXPECT_TRUE(bilstm_encode(p, rows, Pooling::mean).isApprox(want, 1e-12));
}

TEST(Lstm, ShapesAndEdgeCases) {
  const auto p = random_bilstm(8, 16, 2);
  EXPECT_EQ(bilstm_encode(p, MatrixXd::Random(5, 8)).size(), 32);
  const auto empty = bilstm_encode(p, MatrixXd(0, 8));
  EXPECT_EQ(empty.size(), 32);
  EXPECT_TRUE(empty.isZero());
  EXPECT_TRUE(bilstm_encode(p, MatrixXd(0, 8), Pooling::mean).isZero());
  EXPECT_TRUE(bilstm_encode(make_bilstm(8, 16), MatrixXd::Random(1, 8)).isZero());
  EXPECT_THROW(bilstm_encode(p, MatrixXd::Random(3, 7)), std::invalid_argument);
}

TEST(Mlp, ZeroWeightsGiveUniform) {
  EXPECT_TRUE(mlp_classify(make_mlp(6, 4, 2), VectorXd::Random(6)).isApprox(VectorXd::Constant(2, 0.5)));
  EXPECT_TRUE(mlp_classify(make_mlp(6, 4, 4), VectorXd::Random(6)).isApprox(VectorXd::Constant(4, 0.25)));
  EXPECT_THROW(mlp_classify(make_mlp(6, 4, 2), VectorXd::Random(5)), std::invalid_argument);
}

TEST(Mlp, SoftmaxNormalizedAndPositive) {
  std::srand(4);
  for (int i = 0; i < 50; ++i) {
    auto m = make_mlp(5, 7, 4);
    m.w_hidden.setRandom();
    m.w_hidden *= 20.0;
    m.w_out.setRandom();
    m.w_out *= 20.0;
    const auto p = mlp_classify(m, VectorXd::Random(5));
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_GT(p.minCoeff(), 0.0);
  }
  const auto big = softmax(VectorXd{{1000.0, 0.0}});
  EXPECT_TRUE(big.allFinite());
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy(VectorXd{{0.5, 0.5}}, 0), std::log(2.0), 1e-12);
  EXPECT_NEAR(cross_entropy(VectorXd{{1 - 1e-12, 1e-12}}, 0), 0.0, 1e-9);
  EXPECT_NEAR(cross_entropy(VectorXd::Constant(4, 0.25), 3), std::log(4.0), 1e-12);
  EXPECT_THROW(cross_entropy(VectorXd::Constant(2, 0.5), 2), std::out_of_range);
}

TEST(Mii, Examples) {
  EXPECT_EQ(mii(VectorXd{{1, 2}}, VectorXd{{3, 4}}), (VectorXd{{1, 2, 3, 8, -2, -2, 3, 4}}));
  const VectorXd p = VectorXd::Random(5);
  const auto q = mii(p, p);
  EXPECT_EQ(q.size(), 20);
  EXPECT_TRUE(q.segment(10, 5).isZero());
  EXPECT_THROW(mii(VectorXd(2), VectorXd(3)), std::invalid_argument);
}

TEST(Mii, SwapStructure) {
  const VectorXd p = VectorXd::Random(4), r = VectorXd::Random(4);
  const auto a = mii(p, r), b = mii(r, p);
  EXPECT_EQ(b.segment(0, 4), a.segment(12, 4));
  EXPECT_EQ(b.segment(12, 4), a.segment(0, 4));
  EXPECT_EQ(b.segment(4, 4), a.segment(4, 4));
  EXPECT_EQ(b.segment(8, 4), -a.segment(8, 4));
}

NetworkSpec tiny_spec(Fusion fusion, Pooling pooling = Pooling::final_state, std::size_t classes = 2,
                      bool train_embeddings = false) {
  NetworkSpec s;
  s.fusion = fusion;
  s.pooling = pooling;
  s.input_dim = 6;
  s.hidden_dim = 4;
  s.mlp_hidden = 5;
  s.classes = classes;
  s.train_embeddings = train_embeddings;
  return s;
}

TEST(Network, HeadInputWidths) {
  EXPECT_EQ(head_input_dim(tiny_spec(Fusion::mii)), 32u);
  EXPECT_EQ(head_input_dim(tiny_spec(Fusion::concat)), 16u);
  EXPECT_EQ(head_input_dim(tiny_spec(Fusion::joint)), 8u);
  EXPECT_EQ(head_input_dim(tiny_spec(Fusion::pooled)), 12u);
}

TEST(Network, ZeroHeadPredictsUniform) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 1);
  p.net.head = make_mlp(32, 5, 2);
  EXPECT_TRUE(forward(p.net, p.batch[0]).isApprox(VectorXd::Constant(2, 0.5)));
}

struct GradCase {
  Fusion fusion;
  Pooling pooling;
  std::size_t classes;
  bool train_embeddings;
};

class GradientCheck : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const auto c = GetParam();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto p = fixture::tiny_problem(tiny_spec(c.fusion, c.pooling, c.classes, c.train_embeddings), seed, 3, 0, 5);
    auto grads = zeros_like(p.net);
    backward(p.net, std::span<const PairExample>(p.batch), grads);
    const auto check = oracle::check_gradients(p.net, p.batch, grads);
    EXPECT_EQ(check.checked, parameter_count(p.net));
    EXPECT_LT(check.max_relative_error, 1e-4) << "worst at " << check.worst;
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllFusions, GradientCheck,
    ::testing::Values(GradCase{Fusion::mii, Pooling::final_state, 2, false},
                      GradCase{Fusion::mii, Pooling::mean, 4, false},
                      GradCase{Fusion::concat, Pooling::final_state, 2, false},
                      GradCase{Fusion::joint, Pooling::final_state, 4, false},
                      GradCase{Fusion::joint, Pooling::mean, 2, false},
                      GradCase{Fusion::pooled, Pooling::final_state, 2, false},
                      GradCase{Fusion::mii, Pooling::final_state, 2, true},
                      GradCase{Fusion::joint, Pooling::final_state, 2, true}));

TEST(Backward, DuplicatedExampleDoublesGradient) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 5, 1);
  auto one = zeros_like(p.net), two = zeros_like(p.net);
  const double l1 = backward(p.net, std::span<const PairExample>(p.batch), one);
  const std::vector<PairExample> doubled{p.batch[0], p.batch[0]};
  const double l2 = backward(p.net, std::span<const PairExample>(doubled), two);
  EXPECT_DOUBLE_EQ(l2, 2 * l1);
  const auto a = tensors(std::as_const(one)), b = tensors(std::as_const(two));
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].values.size(); ++i) EXPECT_DOUBLE_EQ(b[t].values[i], 2 * a[t].values[i]);
}

TEST(Backward, ConfidentCorrectGivesVanishingGradient) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 6, 1);
  p.net.head.b_out(static_cast<Eigen::Index>(p.batch[0].label)) = 60.0;
  auto grads = zeros_like(p.net);
  const double loss = backward(p.net, std::span<const PairExample>(p.batch), grads);
  EXPECT_LT(loss, 1e-20);
  for (const auto& t : tensors(std::as_const(grads)))
    for (double g : t.values) EXPECT_LT(std::abs(g), 1e-20);
}

TEST(Backward, ThreadCountDoesNotChangeResult) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 7, 9);
  auto a = zeros_like(p.net), b = zeros_like(p.net);
  const double la = backward(p.net, std::span<const PairExample>(p.batch), a, 1);
  const double lb = backward(p.net, std::span<const PairExample>(p.batch), b, 4);
  EXPECT_EQ(la, lb);
  const auto ta = tensors(std::as_const(a)), tb = tensors(std::as_const(b));
  for (std::size_t t = 0; t < ta.size(); ++t)
    EXPECT_TRUE(std::equal(ta[t].values.begin(), ta[t].values.end(), tb[t].values.begin()));
}

TEST(Tensors, FixedOrder) {
  const auto net = make_network(tiny_spec(Fusion::mii, Pooling::final_state, 2, true), 16);
  std::vector<std::string> names;
  for (const auto& t : tensors(net)) names.push_back(t.name);
  EXPECT_EQ(names, (std::vector<std::string>{"encoder.forward.w_input", "encoder.forward.w_recurrent",
                                             "encoder.forward.bias", "encoder.backward.w_input",
                                             "encoder.backward.w_recurrent", "encoder.backward.bias",
                                             "head.w_hidden", "head.b_hidden", "head.w_out", "head.b_out",
                                             "embedding"}));
  EXPECT_EQ(tensors(make_network(tiny_spec(Fusion::pooled))).size(), 4u);
}

TEST(Initialize, DeterministicAndBounded) {
  auto a = make_network(tiny_spec(Fusion::mii)), b = make_network(tiny_spec(Fusion::mii));
  initialize(a, 3);
  initialize(b, 3);
  const auto ta = tensors(std::as_const(a)), tb = tensors(std::as_const(b));
  for (std::size_t t = 0; t < ta.size(); ++t)
    EXPECT_TRUE(std::equal(ta[t].values.begin(), ta[t].values.end(), tb[t].values.begin()));
  EXPECT_LE(a.encoder.forward.w_input.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_GT(a.encoder.forward.w_input.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 8);
  const auto before = p.net;
  auto state = make_adam_state(p.net);
  adam_step(p.net, zeros_like(p.net), state, 1e-3);
  EXPECT_EQ(state.step, 1u);
  EXPECT_EQ(p.net.head.w_hidden, before.head.w_hidden);
  EXPECT_EQ(p.net.encoder.forward.bias, before.encoder.forward.bias);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto net = make_network(tiny_spec(Fusion::pooled));
  auto grads = zeros_like(net);
  for (auto& t : tensors(grads))
    for (double& g : t.values) g = 0.37;
  auto state = make_adam_state(net);
  adam_step(net, grads, state, 1e-2);
  for (const auto& t : tensors(std::as_const(net)))
    for (double v : t.values) EXPECT_NEAR(v, -1e-2, 1e-9);
}

TEST(Adam, Deterministic) {
  auto p = fixture::tiny_problem(tiny_spec(Fusion::mii), 9);
  auto grads = zeros_like(p.net);
  backward(p.net, std::span<const PairExample>(p.batch), grads);
  auto a = p.net, b = p.net;
  auto sa = make_adam_state(a), sb = make_adam_state(b);
  for (int i = 0; i < 3; ++i) {
    adam_step(a, grads, sa, 1e-3);
    adam_step(b, grads, sb, 1e-3);
  }
  EXPECT_EQ(a.head.w_out, b.head.w_out);
  EXPECT_EQ(a.encoder.backward.w_recurrent, b.encoder.backward.w_recurrent);
  EXPECT_THROW(adam_step(a, zeros_like(make_network(tiny_spec(Fusion::pooled))), sa, 1e-3),
               std::invalid_argument);
}

}  // namespace
}  // namespace dpcipi::nn
