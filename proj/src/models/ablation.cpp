#include "dpcipi/models/ablation.hpp"

#include <stdexcept>

#include "dpcipi/models/neural.hpp"

namespace dpcipi {

namespace {

nlohmann::ordered_json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"weighted_precision", m.weighted_precision},
          {"weighted_recall", m.weighted_recall},
          {"weighted_f1", m.weighted_f1}};
}

nlohmann::ordered_json improvement(const Metrics& a, const Metrics& b) {
  nlohmann::ordered_json j;
  auto one = [](double x, double y) {
    nlohmann::ordered_json d;
    d["points"] = (x - y) * 100.0;
    d["relative_percent"] = y != 0.0 ? nlohmann::ordered_json((x - y) / y * 100.0) : nlohmann::ordered_json(nullptr);
    return d;
  };
  j["accuracy"] = one(a.accuracy, b.accuracy);
  j["weighted_precision"] = one(a.weighted_precision, b.weighted_precision);
  j["weighted_recall"] = one(a.weighted_recall, b.weighted_recall);
  j["weighted_f1"] = one(a.weighted_f1, b.weighted_f1);
  return j;
}

}  // namespace

const AblationCell& AblationTask::cell(EmbedInit init, Operator op) const {
  for (const auto& c : cells)
    if (c.init == init && c.op == op) return c;
  throw std::out_of_range("ablation cell not found");
}

AblationReport run_ablation(std::span<const PreprocessedPair> train, std::span<const PreprocessedPair> test,
                            const EmbeddingTable& pretrained, const TrainConfig& cfg, std::span<const Task> tasks) {
  const EmbeddingTable random = random_table(pretrained.k(), pretrained.dim(), cfg.embed_seed);
  AblationReport report;
  report.config = cfg;
  for (Task task : tasks) {
    AblationTask at;
    at.task = task;
    for (EmbedInit init : {EmbedInit::pretrained, EmbedInit::random}) {
      const EmbeddingTable& table = init == EmbedInit::pretrained ? pretrained : random;
      for (Operator op : {Operator::mii, Operator::concat}) {
        TrainConfig c = cfg;
        c.task = task;
        c.embed_init = init;
        c.op = op;
        const auto model = train_dpcipi(train, table, c);
        auto ev = evaluate(model, test, &table);
        at.cells.push_back({init, op, c.seed, table.source(), ev.confusion, ev.metrics, model.history});
      }
    }
    report.tasks.push_back(std::move(at));
  }
  return report;
}

nlohmann::ordered_json to_json(const AblationReport& report) {
  nlohmann::ordered_json j;
  j["config"] = to_json(report.config);
  j["config"].erase("threads");
  j["config_hash"] = config_hash(report.config);
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (const auto& t : report.tasks) {
    nlohmann::ordered_json tj;
    tj["task"] = to_string(t.task);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& c : t.cells) {
      nlohmann::ordered_json r;
      r["init"] = to_string(c.init);
      r["operator"] = to_string(c.op);
      r["seed"] = c.seed;
      r["table_source"] = c.table_source;
      r["metrics"] = metrics_json(c.metrics);
      r["confusion"] = c.confusion.rows();
      r["final_train_loss"] = c.history.empty() ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(c.history.back());
      rows.push_back(std::move(r));
    }
    tj["cells"] = std::move(rows);
    nlohmann::ordered_json imp;
    // pretrained vs random initialization, per operator
    imp["initialization"]["mii"] = improvement(t.cell(EmbedInit::pretrained, Operator::mii).metrics,
                                               t.cell(EmbedInit::random, Operator::mii).metrics);
    imp["initialization"]["concat"] = improvement(t.cell(EmbedInit::pretrained, Operator::concat).metrics,
                                                  t.cell(EmbedInit::random, Operator::concat).metrics);
    // mii vs concatenation, per initialization
    imp["operator"]["pretrained"] = improvement(t.cell(EmbedInit::pretrained, Operator::mii).metrics,
                                                t.cell(EmbedInit::pretrained, Operator::concat).metrics);
    imp["operator"]["random"] = improvement(t.cell(EmbedInit::random, Operator::mii).metrics,
                                            t.cell(EmbedInit::random, Operator::concat).metrics);
    tj["improvements"] = std::move(imp);
    tasks.push_back(std::move(tj));
  }
  j["tasks"] = std::move(tasks);
  return j;
}

}  // namespace dpcipi
