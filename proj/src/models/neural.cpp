#include "dpcipi/models/neural.hpp"

#include <algorithm>
#include <random>

#include "dpcipi/nn/adam.hpp"

namespace dpcipi {

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(epoch) + 1)));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

nn::NetworkSpec network_spec(ModelKind kind, const TrainConfig& cfg, std::size_t input_dim) {
  nn::NetworkSpec spec;
  switch (kind) {
    case ModelKind::dpcipi:
      spec.fusion = cfg.op == Operator::mii ? nn::Fusion::mii : nn::Fusion::concat;
      break;
    case ModelKind::bilstm_concat: spec.fusion = nn::Fusion::joint; break;
    case ModelKind::nn_gse: spec.fusion = nn::Fusion::pooled; break;
    default: throw std::invalid_argument("model kind '" + std::string(to_string(kind)) + "' is not a network");
  }
  spec.pooling = cfg.pooling;
  spec.input_dim = input_dim;
  spec.hidden_dim = cfg.hidden_dim;
  spec.mlp_hidden = cfg.mlp_hidden;
  spec.classes = class_count(cfg.task);
  spec.train_embeddings = cfg.train_embeddings;
  return spec;
}

nn::Network initial_network(ModelKind kind, const TrainConfig& cfg, const EmbeddingTable& table) {
  auto net = nn::make_network(network_spec(kind, cfg, table.dim()), table.size());
  nn::initialize(net, cfg.seed);
  if (cfg.train_embeddings) net.embedding = table.vectors();
  return net;
}

namespace {

TrainedModel train_network(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                           const TrainConfig& cfg) {
  validate(cfg);
  if (pairs.empty()) throw InputError("training set is empty");
  if (table.k() != cfg.k)
    throw InputError("embedding table k=" + std::to_string(table.k()) + " but config k=" + std::to_string(cfg.k));

  std::vector<nn::PairExample> examples;
  examples.reserve(pairs.size());
  for (const auto& p : pairs) examples.push_back(make_example(table, p, cfg.task));

  TrainedModel model;
  model.kind = kind;
  model.config = cfg;
  model.table = describe(table);
  auto net = initial_network(kind, cfg, table);
  auto state = nn::make_adam_state(net);
  nn::Network grads;
  std::vector<const nn::PairExample*> batch;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = epoch_order(examples.size(), cfg.seed, epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(&examples[order[i]]);
      epoch_loss += nn::backward(net, batch, grads, cfg.threads);
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (auto& t : nn::tensors(grads))
        for (auto& v : t.values) v *= scale;
      nn::adam_step(net, grads, state, cfg.learning_rate);
    }
    model.history.push_back(epoch_loss / static_cast<double>(examples.size()));
  }
  model.params = std::move(net);
  return model;
}

struct ScalarData {
  std::vector<double> x;
  std::vector<std::size_t> y;
};

ScalarData scalar_data(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                       const TrainConfig& cfg) {
  validate(cfg);
  if (pairs.empty()) throw InputError("training set is empty");
  ScalarData d;
  for (const auto& p : pairs) {
    d.x.push_back(scalar_feature(kind, p, table));
    d.y.push_back(label_for(cfg.task, p));
  }
  return d;
}

TrainedModel scalar_model(ModelKind kind, const EmbeddingTable* table, const TrainConfig& cfg) {
  TrainedModel m;
  m.kind = kind;
  m.config = cfg;
  if (table && uses_embeddings(kind)) m.table = describe(*table);
  return m;
}

}  // namespace

TrainedModel train_dpcipi(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                          const TrainConfig& cfg) {
  return train_network(ModelKind::dpcipi, pairs, table, cfg);
}

TrainedModel train_bilstm_concat(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                                 const TrainConfig& cfg) {
  return train_network(ModelKind::bilstm_concat, pairs, table, cfg);
}

TrainedModel train_nn_gse(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                          const TrainConfig& cfg) {
  return train_network(ModelKind::nn_gse, pairs, table, cfg);
}

TrainedModel train_lr(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                      const TrainConfig& cfg) {
  const auto d = scalar_data(kind, pairs, table, cfg);
  auto m = scalar_model(kind, table, cfg);
  m.params = fit_logistic(d.x, d.y, class_count(cfg.task));
  return m;
}

TrainedModel train_perceptron(ModelKind kind, std::span<const PreprocessedPair> pairs,
                              const EmbeddingTable* table, const TrainConfig& cfg) {
  if (cfg.task != Task::binary) throw UnsupportedTask("perceptron baselines support the binary task only");
  const auto d = scalar_data(kind, pairs, table, cfg);
  auto m = scalar_model(kind, table, cfg);
  m.params = fit_perceptron(d.x, d.y);
  return m;
}

TrainedModel train_dtree(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                         const TrainConfig& cfg) {
  const auto d = scalar_data(kind, pairs, table, cfg);
  auto m = scalar_model(kind, table, cfg);
  m.params = fit_tree(d.x, d.y, class_count(cfg.task), cfg.dtree_max_depth);
  return m;
}

}  // namespace dpcipi
