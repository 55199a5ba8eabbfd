#include <sstream>

#include <gtest/gtest.h>

#include "dpcipi/error.hpp"
#include "dpcipi/models/ablation.hpp"
#include "dpcipi/models/neural.hpp"
#include "dpcipi/models/trained_model.hpp"
#include "support/fixtures.hpp"

namespace dpcipi {
namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.hidden_dim = 6;
  c.mlp_hidden = 6;
  c.epochs = 3;
  c.learning_rate = 1e-2;
  c.random_dim = 8;
  return c;
}

const fixture::SyntheticSplit& corpus() {
  static const auto split = [] {
    SyntheticOptions o;
    o.pairs = 60;
    o.length = 60;
    o.strain_drift = 5;
    o.seed = 3;
    return fixture::synthetic_split(o);
  }();
  return split;
}

// Large enough that the neural models generalize rather than memorize.
const fixture::SyntheticSplit& separable_corpus() {
  static const auto split = [] {
    SyntheticOptions o;
    o.pairs = 200;
    o.length = 80;
    o.strain_drift = 8;
    o.seed = 3;
    return fixture::synthetic_split(o);
  }();
  return split;
}

// Pooled GSE features need a table whose vectors share a direction.
const EmbeddingTable& anisotropic_table() {
  static const auto t = synthetic_table(6, 64, 5);
  return t;
}

const EmbeddingTable& table() {
  static const auto t = random_table(6, 8, 5);
  return t;
}

std::string checkpoint_text(const TrainedModel& m) {
  std::ostringstream out;
  save_checkpoint(out, m);
  return out.str();
}

TEST(Config, DefaultsAndJson) {
  const TrainConfig d;
  EXPECT_EQ(d.epochs, 50u);
  EXPECT_EQ(d.batch_size, 10u);
  EXPECT_DOUBLE_EQ(d.learning_rate, 1e-4);
  EXPECT_EQ(d.k, 6u);
  auto c = small_config();
  c.task = Task::multilevel;
  c.op = Operator::concat;
  c.pooling = nn::Pooling::mean;
  const auto back = train_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  auto threads = c;
  threads.threads = 8;
  EXPECT_EQ(config_hash(threads), config_hash(c));
  auto seed = c;
  seed.seed = 1;
  EXPECT_NE(config_hash(seed), config_hash(c));
  EXPECT_EQ(train_config_from_json(nlohmann::json::parse(R"({"epochs": 2})")).batch_size, 10u);
}

TEST(Config, Validation) {
  auto c = small_config();
  c.batch_size = 0;
  EXPECT_THROW(validate(c), InputError);
  c = small_config();
  c.learning_rate = -1;
  EXPECT_THROW(validate(c), InputError);
  EXPECT_THROW(task_from_string("ternary"), InputError);
  EXPECT_THROW(train_config_from_json(nlohmann::json::parse(R"({"task": 5})")), InputError);
}

TEST(Config, KindNames) {
  for (auto k : {ModelKind::dpcipi, ModelKind::bilstm_concat, ModelKind::nn_gse, ModelKind::lr_sim, ModelKind::lr_gse,
                 ModelKind::perceptron_sim, ModelKind::perceptron_gse, ModelKind::dtree_sim, ModelKind::dtree_gse})
    EXPECT_EQ(model_kind_from_string(to_string(k)), k);
}

TEST(EpochOrder, PermutationAndSeeded) {
  const auto a = epoch_order(50, 42, 0);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(epoch_order(50, 42, 0), a);
  EXPECT_NE(epoch_order(50, 42, 1), a);
  EXPECT_NE(epoch_order(50, 43, 0), a);
}

TEST(NetworkSpec, Layouts) {
  auto c = small_config();
  EXPECT_EQ(nn::head_input_dim(network_spec(ModelKind::dpcipi, c, 8)), 4u * 2 * 6);
  c.op = Operator::concat;
  EXPECT_EQ(nn::head_input_dim(network_spec(ModelKind::dpcipi, c, 8)), 2u * 2 * 6);
  EXPECT_EQ(nn::head_input_dim(network_spec(ModelKind::bilstm_concat, c, 8)), 2u * 6);
  EXPECT_EQ(nn::head_input_dim(network_spec(ModelKind::nn_gse, c, 8)), 2u * 8);
  c.task = Task::multilevel;
  EXPECT_EQ(network_spec(ModelKind::dpcipi, c, 8).classes, 4u);
}

TEST(Train, HistoryLengthAndDeterminism) {
  const auto cfg = small_config();
  const auto a = train_dpcipi(corpus().train, table(), cfg);
  const auto b = train_dpcipi(corpus().train, table(), cfg);
  EXPECT_EQ(a.history.size(), 3u);
  EXPECT_EQ(checkpoint_text(a), checkpoint_text(b));
  auto threaded = cfg;
  threaded.threads = 3;
  EXPECT_EQ(train_dpcipi(corpus().train, table(), threaded).history, a.history);
  auto zero = cfg;
  zero.epochs = 0;
  const auto init = train_dpcipi(corpus().train, table(), zero);
  EXPECT_TRUE(init.history.empty());
  const auto expected = initial_network(ModelKind::dpcipi, zero, table());
  EXPECT_EQ(std::get<nn::Network>(init.params).head.w_hidden, expected.head.w_hidden);
}

TEST(Train, Errors) {
  EXPECT_THROW(train_dpcipi({}, table(), small_config()), InputError);
  auto c = small_config();
  c.k = 5;
  EXPECT_THROW(train_dpcipi(corpus().train, table(), c), InputError);
  c = small_config();
  c.task = Task::multilevel;
  EXPECT_THROW(train_model(ModelKind::perceptron_sim, corpus().train, nullptr, c), UnsupportedTask);
  EXPECT_THROW(train_model(ModelKind::perceptron_gse, corpus().train, &table(), c), UnsupportedTask);
  EXPECT_THROW(train_model(ModelKind::lr_gse, corpus().train, nullptr, small_config()), InputError);
}

TEST(Train, LossDecreasesOnSyntheticCorpus) {
  auto c = small_config();
  c.epochs = 15;
  const auto m = train_dpcipi(corpus().train, table(), c);
  EXPECT_LT(m.history.back(), m.history.front());
}

TEST(Train, TrainableEmbeddingsMove) {
  auto c = small_config();
  c.train_embeddings = true;
  c.epochs = 1;
  const auto m = train_dpcipi(corpus().train, table(), c);
  const auto& net = std::get<nn::Network>(m.params);
  ASSERT_EQ(net.embedding.rows(), static_cast<Eigen::Index>(table().size()));
  EXPECT_FALSE(net.embedding == RowMatrix(table().vectors()));
}

TEST(Predict, ZeroHeadIsUniformAndIdenticalPairIsBiasOnly) {
  auto m = train_dpcipi(corpus().train, table(), [] {
    auto c = small_config();
    c.epochs = 0;
    return c;
  }());
  auto& net = std::get<nn::Network>(m.params);
  const auto trained_head = net.head;
  net.head = nn::make_mlp(net.head.input_dim(), 6, 2);
  const auto p = predict(m, corpus().test[0], &table());
  EXPECT_TRUE(p.isApprox(Eigen::VectorXd::Constant(2, 0.5)));

  net.head = trained_head;
  PreprocessedPair same = corpus().test[0];
  same.reference_tokens.clear();
  same.test_tokens.clear();
  Eigen::VectorXd hidden = net.head.b_hidden.cwiseMax(0.0);
  const Eigen::VectorXd want = nn::softmax(net.head.w_out * hidden + net.head.b_out);
  EXPECT_TRUE(predict(m, same, &table()).isApprox(want, 1e-12));
  EXPECT_NEAR(predict(m, corpus().test[1], &table()).sum(), 1.0, 1e-12);
  const auto other = random_table(6, 9, 5);
  EXPECT_THROW(predict(m, same, &other), InputError);
}

class EveryKind : public ::testing::TestWithParam<ModelKind> {};

TEST_P(EveryKind, CheckpointRoundTripIsBitIdentical) {
  const auto kind = GetParam();
  auto c = small_config();
  const auto m = train_model(kind, corpus().train, &table(), c);
  const auto text = checkpoint_text(m);
  std::istringstream in(text);
  const auto back = load_checkpoint(in);
  EXPECT_EQ(back.kind, kind);
  EXPECT_EQ(checkpoint_text(back), text);
  for (const auto& p : corpus().test) EXPECT_EQ(predict(back, p, &table()), predict(m, p, &table()));
  const auto ev = evaluate(m, corpus().test, &table());
  EXPECT_EQ(ev.confusion.total(), corpus().test.size());
}

TEST_P(EveryKind, BeatsMajorityOnSeparableCorpus) {
  const auto kind = GetParam();
  auto c = small_config();
  c.epochs = kind == ModelKind::nn_gse ? 100 : 20;  // the pooled MLP learns a norm-like feature slowly
  const auto& data = separable_corpus();
  const auto m = train_model(kind, data.train, &anisotropic_table(), c);
  std::size_t positives = 0;
  for (const auto& p : data.test) positives += static_cast<std::size_t>(p.binary_label);
  const double majority =
      static_cast<double>(std::max(positives, data.test.size() - positives)) / data.test.size();
  EXPECT_GT(evaluate(m, data.test, &anisotropic_table()).metrics.accuracy, majority);
}

INSTANTIATE_TEST_SUITE_P(Models, EveryKind,
                         ::testing::Values(ModelKind::dpcipi, ModelKind::bilstm_concat, ModelKind::nn_gse,
                                           ModelKind::lr_sim, ModelKind::lr_gse, ModelKind::perceptron_sim,
                                           ModelKind::perceptron_gse, ModelKind::dtree_sim, ModelKind::dtree_gse),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Checkpoint, RecordsOperatorAndRejectsTampering) {
  auto c = small_config();
  c.op = Operator::concat;
  c.epochs = 1;
  const auto text = checkpoint_text(train_dpcipi(corpus().train, table(), c));
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["operator"], "concat");
  EXPECT_EQ(j["format"], "dpcipi-checkpoint");
  EXPECT_EQ(j["version"], 1);
  auto tampered = j;
  tampered["config"]["seed"] = 7;
  std::istringstream bad(tampered.dump());
  EXPECT_THROW(load_checkpoint(bad), FormatError);
  std::istringstream junk("{not json");
  EXPECT_THROW(load_checkpoint(junk), FormatError);
  auto short_tensor = j;
  short_tensor["network"]["tensors"]["head.b_out"] = {1.0};
  std::istringstream bad_shape(short_tensor.dump());
  EXPECT_THROW(load_checkpoint(bad_shape), FormatError);
}

TEST(Ablation, GridStructureAndDeterminism) {
  auto c = small_config();
  c.epochs = 1;
  const std::vector<Task> tasks{Task::binary, Task::multilevel};
  const auto report = run_ablation(corpus().train, corpus().test, table(), c, tasks);
  const auto j = to_json(report);
  ASSERT_EQ(j["tasks"].size(), 2u);
  for (const auto& t : j["tasks"]) {
    ASSERT_EQ(t["cells"].size(), 4u);
    for (const auto& cell : t["cells"]) {
      EXPECT_EQ(cell["metrics"].size(), 4u);
      EXPECT_EQ(cell["seed"], c.seed);
    }
    for (const char* axis : {"initialization", "operator"})
      for (const auto& [key, imp] : t["improvements"][axis].items())
        for (const auto& [metric, v] : imp.items()) {
          EXPECT_TRUE(v.contains("points"));
          EXPECT_TRUE(v.contains("relative_percent"));
        }
  }
  const auto& b = report.tasks[0];
  const double points = j["tasks"][0]["improvements"]["operator"]["pretrained"]["weighted_f1"]["points"];
  EXPECT_NEAR(points,
              100.0 * (b.cell(EmbedInit::pretrained, Operator::mii).metrics.weighted_f1 -
                       b.cell(EmbedInit::pretrained, Operator::concat).metrics.weighted_f1),
              1e-12);
  EXPECT_EQ(to_json(run_ablation(corpus().train, corpus().test, table(), c, tasks)).dump(), j.dump());
}

}  // namespace
}  // namespace dpcipi
