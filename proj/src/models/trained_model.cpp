#include "dpcipi/models/trained_model.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <type_traits>

#include <json.hpp>

#include "dpcipi/error.hpp"
#include "dpcipi/models/neural.hpp"

namespace dpcipi {

namespace {

constexpr const char* kCheckpointFormat = "dpcipi-checkpoint";
constexpr int kCheckpointVersion = 1;

KmerSequence as_kmers(const std::string& name, const std::vector<std::string>& tokens, std::size_t k) {
  return KmerSequence{name, tokens, k};
}

const EmbeddingTable& require_table(const EmbeddingTable* table, ModelKind kind) {
  if (!table)
    throw InputError("model kind '" + std::string(to_string(kind)) + "' needs an embedding table");
  return *table;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

nlohmann::ordered_json network_to_json(const nn::Network& net) {
  nlohmann::ordered_json j;
  j["fusion"] = nn::to_string(net.spec.fusion);
  j["pooling"] = nn::to_string(net.spec.pooling);
  j["input_dim"] = net.spec.input_dim;
  j["hidden_dim"] = net.spec.hidden_dim;
  j["mlp_hidden"] = net.spec.mlp_hidden;
  j["classes"] = net.spec.classes;
  j["train_embeddings"] = net.spec.train_embeddings;
  j["vocabulary"] = static_cast<std::size_t>(net.embedding.rows());
  nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
  for (const auto& t : nn::tensors(net))
    tensors[t.name] = std::vector<double>(t.values.begin(), t.values.end());
  j["tensors"] = std::move(tensors);
  return j;
}

nn::Network network_from_json(const nlohmann::json& j) {
  nn::NetworkSpec spec;
  spec.fusion = nn::fusion_from_string(j.at("fusion").get<std::string>());
  spec.pooling = nn::pooling_from_string(j.at("pooling").get<std::string>());
  spec.input_dim = j.at("input_dim").get<std::size_t>();
  spec.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  spec.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  spec.classes = j.at("classes").get<std::size_t>();
  spec.train_embeddings = j.at("train_embeddings").get<bool>();
  auto net = nn::make_network(spec, j.at("vocabulary").get<std::size_t>());
  const auto& stored = j.at("tensors");
  for (auto& t : nn::tensors(net)) {
    const auto values = stored.at(t.name).get<std::vector<double>>();
    if (values.size() != t.values.size())
      throw FormatError("checkpoint tensor '" + t.name + "' has " + std::to_string(values.size()) +
                        " values, expected " + std::to_string(t.values.size()));
    std::copy(values.begin(), values.end(), t.values.begin());
  }
  return net;
}

}  // namespace

TableInfo describe(const EmbeddingTable& table) {
  return {table.source(), table.k(), table.dim(), table.vocabulary_hash()};
}

nn::PairExample make_example(const EmbeddingTable& table, const PreprocessedPair& pair, Task task) {
  return nn::make_example(table, as_kmers(pair.reference_name, pair.reference_tokens, table.k()),
                          as_kmers(pair.test_name, pair.test_tokens, table.k()), label_for(task, pair));
}

double scalar_feature(ModelKind kind, const PreprocessedPair& pair, const EmbeddingTable* table) {
  switch (kind) {
    case ModelKind::lr_sim:
    case ModelKind::perceptron_sim:
    case ModelKind::dtree_sim:
      return pair.similarity;
    case ModelKind::lr_gse:
    case ModelKind::perceptron_gse:
    case ModelKind::dtree_gse: {
      const auto& t = require_table(table, kind);
      return gse_similarity(embed_sequence(t, as_kmers(pair.reference_name, pair.reference_tokens, t.k())),
                            embed_sequence(t, as_kmers(pair.test_name, pair.test_tokens, t.k())));
    }
    default:
      throw std::invalid_argument("model kind '" + std::string(to_string(kind)) + "' has no scalar feature");
  }
}

TrainedModel train_model(ModelKind kind, std::span<const PreprocessedPair> pairs, const EmbeddingTable* table,
                         const TrainConfig& cfg) {
  switch (kind) {
    case ModelKind::dpcipi: return train_dpcipi(pairs, require_table(table, kind), cfg);
    case ModelKind::bilstm_concat: return train_bilstm_concat(pairs, require_table(table, kind), cfg);
    case ModelKind::nn_gse: return train_nn_gse(pairs, require_table(table, kind), cfg);
    case ModelKind::lr_sim:
    case ModelKind::lr_gse: return train_lr(kind, pairs, table, cfg);
    case ModelKind::perceptron_sim:
    case ModelKind::perceptron_gse: return train_perceptron(kind, pairs, table, cfg);
    case ModelKind::dtree_sim:
    case ModelKind::dtree_gse: return train_dtree(kind, pairs, table, cfg);
  }
  throw std::invalid_argument("unknown model kind");
}

Eigen::VectorXd predict(const TrainedModel& model, const PreprocessedPair& pair, const EmbeddingTable* table) {
  if (const auto* net = std::get_if<nn::Network>(&model.params)) {
    const auto& t = require_table(table, model.kind);
    if (t.k() != model.table.k || t.dim() != model.table.dim)
      throw InputError("embedding table (k=" + std::to_string(t.k()) + ", dim=" + std::to_string(t.dim()) +
                       ") does not match the model (k=" + std::to_string(model.table.k) +
                       ", dim=" + std::to_string(model.table.dim) + ")");
    return nn::forward(*net, make_example(t, pair, model.task()));
  }
  const double x = scalar_feature(model.kind, pair, table);
  if (const auto* lr = std::get_if<LogisticModel>(&model.params)) return predict_proba(*lr, x);
  if (const auto* tree = std::get_if<DecisionTree>(&model.params)) return predict_proba(*tree, x);
  const auto& perceptron = std::get<PerceptronModel>(model.params);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  p(static_cast<Eigen::Index>(predict_class(perceptron, x))) = 1.0;
  return p;
}

std::size_t argmax(const Eigen::VectorXd& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

Evaluation evaluate(const TrainedModel& model, std::span<const PreprocessedPair> pairs,
                    const EmbeddingTable* table) {
  std::vector<std::size_t> predictions, labels;
  predictions.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    predictions.push_back(argmax(predict(model, p, table)));
    labels.push_back(label_for(model.task(), p));
  }
  Evaluation e{confusion(predictions, labels, model.classes()), {}};
  e.metrics = weighted_metrics(e.confusion);
  return e;
}

void save_checkpoint(std::ostream& out, const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["kind"] = to_string(model.kind);
  j["task"] = to_string(model.task());
  if (const auto* net = std::get_if<nn::Network>(&model.params)) {
    j["operator"] = nn::to_string(net->spec.fusion);
  }
  j["config"] = to_json(model.config);
  j["config_hash"] = config_hash(model.config);
  j["history"] = model.history;
  j["table"] = {{"source", model.table.source},
                {"k", model.table.k},
                {"dim", model.table.dim},
                {"vocabulary_hash", hex64(model.table.vocabulary_hash)}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, nn::Network>) {
          j["network"] = network_to_json(p);
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          j["logistic"] = to_json(p);
        } else if constexpr (std::is_same_v<T, PerceptronModel>) {
          j["perceptron"] = to_json(p);
        } else {
          j["tree"] = to_json(p);
        }
      },
      model.params);
  out << j.dump() << '\n';
}

TrainedModel load_checkpoint(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw FormatError("not a model checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw FormatError("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
    TrainedModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.config = train_config_from_json(j.at("config"));
    m.history = j.at("history").get<std::vector<double>>();
    const auto& t = j.at("table");
    m.table.source = t.at("source").get<std::string>();
    m.table.k = t.at("k").get<std::size_t>();
    m.table.dim = t.at("dim").get<std::size_t>();
    m.table.vocabulary_hash = parse_hex64(t.at("vocabulary_hash").get<std::string>());
    if (j.contains("network")) {
      m.params = network_from_json(j["network"]);
    } else if (j.contains("logistic")) {
      m.params = logistic_from_json(j["logistic"]);
    } else if (j.contains("perceptron")) {
      m.params = perceptron_from_json(j["perceptron"]);
    } else if (j.contains("tree")) {
      m.params = tree_from_json(j["tree"]);
    } else {
      throw FormatError("checkpoint holds no model parameters");
    }
    if (j.at("config_hash").get<std::string>() != config_hash(m.config))
      throw FormatError("checkpoint config hash does not match its config");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace dpcipi
