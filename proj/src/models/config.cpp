#include "dpcipi/models/config.hpp"

#include <cstdio>
#include <stdexcept>

#include "dpcipi/error.hpp"
#include "dpcipi/nn/network.hpp"

namespace dpcipi {

std::string_view to_string(Task t) { return t == Task::binary ? "binary" : "multilevel"; }
std::string_view to_string(EmbedInit e) { return e == EmbedInit::pretrained ? "pretrained" : "random"; }
std::string_view to_string(Operator o) { return o == Operator::mii ? "mii" : "concat"; }

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::dpcipi: return "dpcipi";
    case ModelKind::bilstm_concat: return "bilstm_concat";
    case ModelKind::nn_gse: return "nn_gse";
    case ModelKind::lr_sim: return "lr_sim";
    case ModelKind::lr_gse: return "lr_gse";
    case ModelKind::perceptron_sim: return "perceptron_sim";
    case ModelKind::perceptron_gse: return "perceptron_gse";
    case ModelKind::dtree_sim: return "dtree_sim";
    case ModelKind::dtree_gse: return "dtree_gse";
  }
  return "?";
}

Task task_from_string(std::string_view s) {
  if (s == "binary") return Task::binary;
  if (s == "multilevel") return Task::multilevel;
  throw InputError("unknown task '" + std::string(s) + "' (binary|multilevel)");
}

EmbedInit embed_init_from_string(std::string_view s) {
  if (s == "pretrained") return EmbedInit::pretrained;
  if (s == "random") return EmbedInit::random;
  throw InputError("unknown embedding init '" + std::string(s) + "' (pretrained|random)");
}

Operator operator_from_string(std::string_view s) {
  if (s == "mii") return Operator::mii;
  if (s == "concat") return Operator::concat;
  throw InputError("unknown operator '" + std::string(s) + "' (mii|concat)");
}

ModelKind model_kind_from_string(std::string_view s) {
  for (auto k : {ModelKind::dpcipi, ModelKind::bilstm_concat, ModelKind::nn_gse, ModelKind::lr_sim,
                 ModelKind::lr_gse, ModelKind::perceptron_sim, ModelKind::perceptron_gse, ModelKind::dtree_sim,
                 ModelKind::dtree_gse})
    if (to_string(k) == s) return k;
  throw InputError("unknown model kind '" + std::string(s) + "'");
}

std::size_t class_count(Task t) { return t == Task::binary ? 2 : 4; }

std::size_t label_for(Task t, const PreprocessedPair& pair) {
  return static_cast<std::size_t>(t == Task::binary ? pair.binary_label : pair.level_label);
}

bool is_neural(ModelKind k) {
  return k == ModelKind::dpcipi || k == ModelKind::bilstm_concat || k == ModelKind::nn_gse;
}

bool uses_embeddings(ModelKind k) {
  return is_neural(k) || k == ModelKind::lr_gse || k == ModelKind::perceptron_gse || k == ModelKind::dtree_gse;
}

void validate(const TrainConfig& cfg) {
  if (cfg.k == 0) throw InputError("k must be positive");
  if (cfg.batch_size == 0) throw InputError("batch_size must be positive");
  if (!(cfg.learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (cfg.hidden_dim == 0 || cfg.mlp_hidden == 0) throw InputError("layer sizes must be positive");
  if (cfg.random_dim == 0) throw InputError("random_dim must be positive");
  if (cfg.dtree_max_depth == 0) throw InputError("dtree_max_depth must be positive");
}

nlohmann::ordered_json to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["task"] = to_string(cfg.task);
  j["k"] = cfg.k;
  j["embed_init"] = to_string(cfg.embed_init);
  j["embed_seed"] = cfg.embed_seed;
  j["random_dim"] = cfg.random_dim;
  j["operator"] = to_string(cfg.op);
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["seed"] = cfg.seed;
  j["hidden_dim"] = cfg.hidden_dim;
  j["mlp_hidden"] = cfg.mlp_hidden;
  j["pooling"] = nn::to_string(cfg.pooling);
  j["train_embeddings"] = cfg.train_embeddings;
  j["dtree_max_depth"] = cfg.dtree_max_depth;
  j["threads"] = cfg.threads;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  try {
    if (j.contains("task")) c.task = task_from_string(j["task"].get<std::string>());
    if (j.contains("k")) c.k = j["k"].get<std::size_t>();
    if (j.contains("embed_init")) c.embed_init = embed_init_from_string(j["embed_init"].get<std::string>());
    if (j.contains("embed_seed")) c.embed_seed = j["embed_seed"].get<std::uint64_t>();
    if (j.contains("random_dim")) c.random_dim = j["random_dim"].get<std::size_t>();
    if (j.contains("operator")) c.op = operator_from_string(j["operator"].get<std::string>());
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("hidden_dim")) c.hidden_dim = j["hidden_dim"].get<std::size_t>();
    if (j.contains("mlp_hidden")) c.mlp_hidden = j["mlp_hidden"].get<std::size_t>();
    if (j.contains("pooling")) c.pooling = nn::pooling_from_string(j["pooling"].get<std::string>());
    if (j.contains("train_embeddings")) c.train_embeddings = j["train_embeddings"].get<bool>();
    if (j.contains("dtree_max_depth")) c.dtree_max_depth = j["dtree_max_depth"].get<std::size_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid training config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid training config: ") + e.what());
  }
  return c;
}

std::string config_hash(const TrainConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("threads");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpcipi
