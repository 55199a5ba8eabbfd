#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcipi/embed.hpp"
#include "dpcipi/nn/lstm.hpp"
#include "dpcipi/nn/mlp.hpp"

namespace dpcipi::nn {

// How the two strains reach the classifier.
enum class Fusion {
  mii,     // shared BiLSTM per strain, head sees [p; p*r; p-r; r]
  concat,  // shared BiLSTM per strain, head sees [p; r]
  joint,   // one BiLSTM over reference rows followed by test rows
  pooled,  // no encoder, head sees [mean(ref rows); mean(test rows)]
};

std::string_view to_string(Fusion f);
Fusion fusion_from_string(std::string_view s);
std::string_view to_string(Pooling p);
Pooling pooling_from_string(std::string_view s);

struct NetworkSpec {
  Fusion fusion = Fusion::mii;
  Pooling pooling = Pooling::final_state;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 128;
  std::size_t mlp_hidden = 128;
  std::size_t classes = 2;
  bool train_embeddings = false;
};

std::size_t head_input_dim(const NetworkSpec& spec);

struct Network {
  NetworkSpec spec;
  BiLstmParams encoder;  // empty for Fusion::pooled
  MlpParams head;
  RowMatrix embedding;   // trainable table copy, empty when embeddings are frozen
};

/// All tensors zero. `vocabulary` sizes the embedding copy when it is trainable.
Network make_network(const NetworkSpec& spec, std::size_t vocabulary = 0);
Network zeros_like(const Network& net);

/// Uniform(-1/sqrt(fan), 1/sqrt(fan)) weights: fan = H for the LSTM, fan_in for
/// each dense layer. The embedding copy, if any, is left untouched.
void initialize(Network& net, std::uint64_t seed);

struct TensorView {
  std::string name;
  std::span<double> values;
};
struct ConstTensorView {
  std::string name;
  std::span<const double> values;
};

/// Fixed enumeration order over every trainable tensor.
std::vector<TensorView> tensors(Network& net);
std::vector<ConstTensorView> tensors(const Network& net);
std::size_t parameter_count(const Network& net);

struct PairExample {
  EmbeddingPlan reference_plan;
  EmbeddingPlan test_plan;
  SequenceEmbedding reference;  // materialized from the frozen table
  SequenceEmbedding test;
  std::size_t label = 0;
};

PairExample make_example(const EmbeddingTable& table, const KmerSequence& reference, const KmerSequence& test,
                         std::size_t label);

/// Class probabilities for one pair.
Eigen::VectorXd forward(const Network& net, const PairExample& example);

/// Adds d(-log p[label])/dparams into grads and returns the loss.
double accumulate_gradients(const Network& net, const PairExample& example, Network& grads);

/// Summed loss and summed gradients over the batch. grads is overwritten.
/// Per-example gradients are reduced in batch order, so the result does not
/// depend on the thread count.
double backward(const Network& net, std::span<const PairExample* const> batch, Network& grads,
                std::size_t threads = 1);
double backward(const Network& net, std::span<const PairExample> batch, Network& grads,
                std::size_t threads = 1);

}  // namespace dpcipi::nn
