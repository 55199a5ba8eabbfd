#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dpcipi/embed.hpp"
#include "dpcipi/eval.hpp"
#include "dpcipi/models/config.hpp"
#include "dpcipi/models/statistical.hpp"
#include "dpcipi/nn/network.hpp"

namespace dpcipi {

// Identity of the table a model was trained against.
struct TableInfo {
  std::string source;
  std::size_t k = 0;
  std::size_t dim = 0;
  std::uint64_t vocabulary_hash = 0;
};

TableInfo describe(const EmbeddingTable& table);

struct TrainedModel {
  ModelKind kind = ModelKind::dpcipi;
  TrainConfig config;
  std::vector<double> history;  // mean training loss per epoch (neural models)
  std::variant<nn::Network, LogisticModel, PerceptronModel, DecisionTree> params;
  TableInfo table;  // empty source for similarity-only models

  Task task() const { return config.task; }
  std::size_t classes() const { return class_count(config.task); }
};

/// Dispatches to the trainer for `kind`. `table` may be null only for the
/// alignment-similarity baselines.
TrainedModel train_model(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                         const TrainConfig& cfg);

/// Class probabilities (2 or 4 per the model's task).
Eigen::VectorXd predict(const TrainedModel& model, const PreprocessedPair& pair, const EmbeddingTable* table);

std::size_t argmax(const Eigen::VectorXd& probs);

/// The scalar a statistical baseline consumes for this pair.
double scalar_feature(ModelKind kind, const PreprocessedPair& pair, const EmbeddingTable* table);

nn::PairExample make_example(const EmbeddingTable& table, const PreprocessedPair& pair, Task task);

struct Evaluation {
  ConfusionMatrix confusion;
  Metrics metrics;
};

/// Argmax predictions over `pairs` scored against the model's task labels.
Evaluation evaluate(const TrainedModel& model, std::span<const PreprocessedPair> pairs,
                    const EmbeddingTable* table);

void save_checkpoint(std::ostream& out, const TrainedModel& model);
TrainedModel load_checkpoint(std::istream& in);

}  // namespace dpcipi
