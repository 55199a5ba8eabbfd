#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpcipi/error.hpp"
#include "dpcipi/models/trained_model.hpp"

namespace dpcipi {

/// Per-epoch permutation of [0, n); a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

nn::NetworkSpec network_spec(ModelKind kind, const TrainConfig& cfg, std::size_t input_dim);

/// Network at its seeded initial state (what an epochs=0 run returns).
nn::Network initial_network(ModelKind kind, const TrainConfig& cfg, const EmbeddingTable& table);

/// Mini-batch Adam on the mean batch loss for cfg.epochs epochs.
TrainedModel train_dpcipi(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                          const TrainConfig& cfg);
TrainedModel train_bilstm_concat(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                                 const TrainConfig& cfg);
TrainedModel train_nn_gse(std::span<const PreprocessedPair> pairs, const EmbeddingTable& table,
                          const TrainConfig& cfg);

TrainedModel train_lr(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                      const TrainConfig& cfg);
/// Binary only; a multilevel config throws UnsupportedTask.
TrainedModel train_perceptron(ModelKind kind, std::span<const PreprocessedPair> pairs,
                              const EmbeddingTable* table, const TrainConfig& cfg);
TrainedModel train_dtree(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                         const TrainConfig& cfg);

class UnsupportedTask : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace dpcipi
