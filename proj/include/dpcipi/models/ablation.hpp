#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcipi/models/trained_model.hpp"

namespace dpcipi {

struct AblationCell {
  EmbedInit init = EmbedInit::pretrained;
  Operator op = Operator::mii;
  std::uint64_t seed = 0;
  std::string table_source;
  ConfusionMatrix confusion;
  Metrics metrics;
  std::vector<double> history;
};

struct AblationTask {
  Task task = Task::binary;
  std::vector<AblationCell> cells;  // (pretrained,mii), (pretrained,concat), (random,mii), (random,concat)

  const AblationCell& cell(EmbedInit init, Operator op) const;
};

struct AblationReport {
  TrainConfig config;
  std::vector<AblationTask> tasks;
};

/// Trains the {pretrained, random} x {mii, concat} DPCIPI grid per task with
/// identical seeds and scores every cell on `test`. The random table has the
/// pretrained table's k and dim and is seeded with cfg.embed_seed.
AblationReport run_ablation(std::span<const PreprocessedPair> train, std::span<const PreprocessedPair> test,
                            const EmbeddingTable& pretrained, const TrainConfig& cfg, std::span<const Task> tasks);

/// Cells carry metrics as fractions. Improvements are reported both as
/// percentage-point differences and as relative percentages.
nlohmann::ordered_json to_json(const AblationReport& report);

}  // namespace dpcipi
