#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dpcipi/kmer.hpp"
#include "dpcipi/nn/lstm.hpp"

namespace dpcipi {

enum class Task { binary, multilevel };
enum class EmbedInit { pretrained, random };
enum class Operator { mii, concat };

enum class ModelKind {
  dpcipi,
  bilstm_concat,
  nn_gse,
  lr_sim,
  lr_gse,
  perceptron_sim,
  perceptron_gse,
  dtree_sim,
  dtree_gse,
};

std::string_view to_string(Task t);
std::string_view to_string(EmbedInit e);
std::string_view to_string(Operator o);
std::string_view to_string(ModelKind k);
Task task_from_string(std::string_view s);
EmbedInit embed_init_from_string(std::string_view s);
Operator operator_from_string(std::string_view s);
ModelKind model_kind_from_string(std::string_view s);

std::size_t class_count(Task t);
std::size_t label_for(Task t, const PreprocessedPair& pair);
bool is_neural(ModelKind k);
bool uses_embeddings(ModelKind k);

struct TrainConfig {
  Task task = Task::binary;
  std::size_t k = kDefaultK;
  EmbedInit embed_init = EmbedInit::pretrained;
  std::uint64_t embed_seed = 7;
  std::size_t random_dim = 768;  // width of the random table when no pretrained table is loaded
  Operator op = Operator::mii;
  std::size_t epochs = 50;
  std::size_t batch_size = 10;
  double learning_rate = 1e-4;
  std::uint64_t seed = 42;
  std::size_t hidden_dim = 128;
  std::size_t mlp_hidden = 128;
  nn::Pooling pooling = nn::Pooling::final_state;
  bool train_embeddings = false;
  std::size_t dtree_max_depth = 5;
  std::size_t threads = 1;  // does not affect results
};

/// Throws InputError on non-positive batch size, learning rate, etc.
void validate(const TrainConfig& cfg);

nlohmann::ordered_json to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

/// FNV-1a of the canonical JSON, excluding `threads`.
std::string config_hash(const TrainConfig& cfg);

}  // namespace dpcipi
