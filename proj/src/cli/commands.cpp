#include "dpcipi/cli.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpcipi/align.hpp"
#include "dpcipi/embed.hpp"
#include "dpcipi/error.hpp"
#include "dpcipi/eval.hpp"
#include "dpcipi/models/ablation.hpp"
#include "dpcipi/models/trained_model.hpp"
#include "dpcipi/seqio.hpp"
#include "dpcipi/synthetic.hpp"

namespace fs = std::filesystem;

namespace dpcipi {

namespace {

constexpr const char* kOffsetsFile = "offsets.json";
constexpr const char* kDatasetFile = "dataset.jsonl";
constexpr const char* kTrainPairsFile = "train_pairs.jsonl";
constexpr const char* kTestPairsFile = "test_pairs.jsonl";
constexpr const char* kSummaryFile = "summary.json";
constexpr const char* kCheckpointFile = "model.json";
constexpr const char* kHistoryFile = "history.json";
constexpr const char* kMetricsFile = "metrics.json";
constexpr const char* kConfusionFile = "confusion.csv";
constexpr const char* kAblationFile = "ablation.json";

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task;
  std::optional<std::string> op;
  std::optional<std::string> init;
  std::optional<std::size_t> epochs;
  std::optional<std::string> model;
  std::optional<std::size_t> threads;
  std::string checkpoint;
};

TailMode tail_from_string(std::string_view s) {
  if (s == "keep") return TailMode::keep;
  if (s == "truncate") return TailMode::truncate;
  throw InputError("unknown tail mode '" + std::string(s) + "'");
}

DistanceRule distance_from_string(std::string_view s) {
  if (s == "hamming_with_overhang") return DistanceRule::hamming_with_overhang;
  if (s == "overlap_hamming") return DistanceRule::overlap_hamming;
  throw InputError("unknown distance rule '" + std::string(s) + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

RunConfig apply(RunConfig run, const Overrides& o) {
  if (o.seed) run.train.seed = *o.seed;
  if (o.task) run.train.task = task_from_string(*o.task);
  if (o.op) run.train.op = operator_from_string(*o.op);
  if (o.init) run.train.embed_init = embed_init_from_string(*o.init);
  if (o.epochs) run.train.epochs = *o.epochs;
  if (o.model) run.model = model_kind_from_string(*o.model);
  if (o.threads) run.train.threads = *o.threads;
  validate(run.train);
  return run;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

template <class F>
void write_with(const fs::path& path, F&& fill) {
  std::ostringstream ss;
  fill(ss);
  write_text(path, ss.str());
}

fs::path workdir(const RunConfig& run) {
  fs::create_directories(run.paths.workdir);
  return run.paths.workdir;
}

std::vector<PreprocessedPair> read_pairs(const fs::path& path) {
  if (!fs::exists(path))
    throw InputError("missing '" + path.string() + "'; run the preprocess command first");
  std::ifstream in(path, std::ios::binary);
  try {
    return read_pairs_jsonl(in);
  } catch (const ParseError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

EmbeddingTable load_pretrained(const RunConfig& run) {
  if (run.paths.embedding_table.empty())
    throw InputError("pretrained initialization needs paths.embedding_table");
  const auto path = run.paths.embedding_table.string();
  if (!fs::exists(run.paths.embedding_table)) throw InputError("embedding table '" + path + "' not found");
  auto table = load_table(path);
  if (table.k() != run.train.k)
    throw InputError("embedding table '" + path + "' has k=" + std::to_string(table.k()) + ", config has k=" +
                     std::to_string(run.train.k));
  return table;
}

// The table a model of this kind and config trains or runs against.
std::optional<EmbeddingTable> resolve_table(const RunConfig& run, ModelKind kind, const TrainConfig& cfg) {
  if (!uses_embeddings(kind)) return std::nullopt;
  if (cfg.embed_init == EmbedInit::random) return random_table(cfg.k, cfg.random_dim, cfg.embed_seed);
  return load_pretrained(run);
}

TrainedModel read_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path.string() + "'");
  try {
    return load_checkpoint(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void check_table(const TrainedModel& model, const std::optional<EmbeddingTable>& table) {
  if (!table) return;
  if (table->vocabulary_hash() != model.table.vocabulary_hash || table->dim() != model.table.dim)
    throw InputError("embedding table does not match the one the checkpoint was trained with");
}

fs::path checkpoint_path(const RunConfig& run, const Overrides& o) {
  return o.checkpoint.empty() ? run.paths.workdir / kCheckpointFile : fs::path(o.checkpoint);
}

nlohmann::ordered_json class_counts(const std::vector<PreprocessedPair>& pairs) {
  std::vector<std::size_t> binary(2, 0), level(4, 0);
  for (const auto& p : pairs) {
    ++binary.at(static_cast<std::size_t>(p.binary_label));
    ++level.at(static_cast<std::size_t>(p.level_label));
  }
  return {{"pairs", pairs.size()}, {"binary", binary}, {"level", level}};
}

int cmd_preprocess(const RunConfig& run, std::ostream& out) {
  if (run.paths.fasta.empty() || run.paths.hi_csv.empty())
    throw InputError("preprocess needs paths.fasta and paths.hi_csv");
  std::vector<NucleotideSequence> seqs;
  try {
    seqs = parse_fasta(read_file(run.paths.fasta.string()));
  } catch (const ParseError& e) {
    throw InputError(run.paths.fasta.string() + ": " + e.what());
  }
  HiTable hi;
  try {
    hi = parse_hi_table(read_file(run.paths.hi_csv.string()));
  } catch (const ParseError& e) {
    throw InputError(run.paths.hi_csv.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(run.paths.hi_csv.string() + ": " + e.what());
  }
  const auto dataset = build_dataset(hi.records, seqs);
  const auto offsets = align_sequences(seqs);
  const auto pairs = preprocess_pairs(dataset, offsets, {run.train.k, run.tail, run.distance});

  std::vector<PreprocessedPair> train, test;
  for (const auto& p : pairs) (p.split == Split::train ? train : test).push_back(p);

  const auto dir = workdir(run);
  write_text(dir / kOffsetsFile, to_json(offsets).dump(2) + "\n");
  write_with(dir / kDatasetFile, [&](std::ostream& s) { write_dataset_jsonl(s, dataset); });
  write_with(dir / kTrainPairsFile, [&](std::ostream& s) { write_pairs_jsonl(s, train); });
  write_with(dir / kTestPairsFile, [&](std::ostream& s) { write_pairs_jsonl(s, test); });

  nlohmann::ordered_json summary = class_counts(pairs);
  summary["skipped_rows"] = hi.skipped;
  summary["train"] = class_counts(train);
  summary["test"] = class_counts(test);
  const auto text = summary.dump(2) + "\n";
  write_text(dir / kSummaryFile, text);
  out << text;
  return 0;
}

int cmd_train(const RunConfig& run, const Overrides& o, std::ostream& out) {
  const auto train = read_pairs(run.paths.workdir / kTrainPairsFile);
  const auto table = resolve_table(run, run.model, run.train);
  const auto model = train_model(run.model, train, table ? &*table : nullptr, run.train);
  const auto dir = workdir(run);
  const auto ckpt = checkpoint_path(run, o);
  write_with(ckpt, [&](std::ostream& s) { save_checkpoint(s, model); });
  nlohmann::ordered_json history;
  history["model"] = to_string(model.kind);
  history["task"] = to_string(model.task());
  history["config_hash"] = config_hash(model.config);
  history["loss"] = model.history;
  write_text(dir / kHistoryFile, history.dump(2) + "\n");
  out << "trained " << to_string(model.kind) << " (" << to_string(model.task()) << ") on " << train.size()
      << " pairs, " << model.history.size() << " epochs -> " << ckpt.string() << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& run, const Overrides& o, std::ostream& out) {
  const auto model = read_checkpoint(checkpoint_path(run, o));
  if (o.task && task_from_string(*o.task) != model.task())
    throw InputError("checkpoint was trained for task '" + std::string(to_string(model.task())) +
                     "', not '" + *o.task + "'");
  const auto test = read_pairs(run.paths.workdir / kTestPairsFile);
  if (test.empty()) throw InputError("test split is empty");
  const auto table = resolve_table(run, model.kind, model.config);
  check_table(model, table);
  const auto ev = evaluate(model, test, table ? &*table : nullptr);
  const auto dir = workdir(run);
  const auto report =
      metrics_report(std::string(to_string(model.task())), std::string(to_string(model.kind)), ev.confusion,
                     ev.metrics);
  const auto text = report.dump(2) + "\n";
  write_text(dir / kMetricsFile, text);
  write_with(dir / kConfusionFile, [&](std::ostream& s) { write_confusion_csv(s, ev.confusion); });
  out << text;
  return 0;
}

int cmd_ablate(const RunConfig& run, const Overrides& o, std::ostream& out) {
  const auto train = read_pairs(run.paths.workdir / kTrainPairsFile);
  const auto test = read_pairs(run.paths.workdir / kTestPairsFile);
  if (test.empty()) throw InputError("test split is empty");
  const auto table = load_pretrained(run);
  std::vector<Task> tasks{Task::binary, Task::multilevel};
  if (o.task) tasks = {task_from_string(*o.task)};
  const auto report = run_ablation(train, test, table, run.train, tasks);
  const auto text = to_json(report).dump(2) + "\n";
  write_text(workdir(run) / kAblationFile, text);
  out << text;
  return 0;
}

NucleotideSequence query_sequence(const std::string& flag, const std::string& bases) {
  NucleotideSequence seq{flag, "query", {}};
  for (char raw : bases) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
    if (!is_nucleotide(c)) throw InputError(flag + ": invalid nucleotide '" + std::string(1, raw) + "'");
    seq.bases.push_back(c);
  }
  if (seq.bases.empty()) throw InputError(flag + ": empty sequence");
  return seq;
}

int cmd_predict(const RunConfig& run, const Overrides& o, const std::string& ref_bases,
                const std::string& test_bases, std::ostream& out) {
  const auto model = read_checkpoint(checkpoint_path(run, o));
  const auto offsets_path = run.paths.workdir / kOffsetsFile;
  if (!fs::exists(offsets_path))
    throw InputError("missing '" + offsets_path.string() + "'; run the preprocess command first");
  const auto stored = offset_map_from_json(nlohmann::json::parse(read_file(offsets_path.string())));

  // Offsets of the query strains come from re-aligning them against the stored template.
  const std::vector<NucleotideSequence> seqs{{"stored template", "template", stored.template_bases},
                                             query_sequence("--reference", ref_bases),
                                             query_sequence("--test", test_bases)};
  const auto offsets = align_sequences(seqs);
  const VirusPair pair{seqs[1], seqs[2], 0.0, 0, 0, Split::test};
  const auto pre = preprocess_pairs(std::span(&pair, 1), offsets, {model.config.k, run.tail, run.distance});

  const auto table = resolve_table(run, model.kind, model.config);
  check_table(model, table);
  const auto probs = predict(model, pre.front(), table ? &*table : nullptr);
  nlohmann::ordered_json j;
  j["model"] = to_string(model.kind);
  j["task"] = to_string(model.task());
  j["probabilities"] = std::vector<double>(probs.data(), probs.data() + probs.size());
  j["predicted_class"] = argmax(probs);
  out << j.dump() << "\n";
  return 0;
}

int cmd_synth(const fs::path& dir, const SyntheticOptions& options, std::size_t dim, std::size_t hidden,
              std::ostream& out) {
  fs::create_directories(dir);
  const auto corpus = make_synthetic_corpus(options);
  write_with(dir / "sequences.fasta", [&](std::ostream& s) { write_fasta(s, corpus.sequences); });
  write_with(dir / "hi.csv", [&](std::ostream& s) { write_hi_csv(s, corpus.records); });
  write_with(dir / "table.tsv",
             [&](std::ostream& s) { write_table(s, synthetic_table(kDefaultK, dim, options.seed)); });
  TrainConfig cfg;
  cfg.hidden_dim = hidden;
  cfg.mlp_hidden = hidden;
  cfg.random_dim = dim;
  nlohmann::ordered_json j;
  j["paths"] = {{"fasta", "sequences.fasta"}, {"hi_csv", "hi.csv"}, {"embedding_table", "table.tsv"},
                {"workdir", "work"}};
  j["model"] = "dpcipi";
  j["preprocess"] = {{"tail", "keep"}, {"distance", "hamming_with_overhang"}};
  j["train"] = to_json(cfg);
  write_text(dir / "config.json", j.dump(2) + "\n");
  out << "wrote " << corpus.records.size() << " pairs to " << dir.string() << "\n";
  return 0;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("config file '" + path.string() + "' not found");
  const auto base = path.parent_path();
  RunConfig run;
  try {
    const auto j = nlohmann::json::parse(read_file(path.string()));
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      run.paths.fasta = resolve(base, p.value("fasta", ""));
      run.paths.hi_csv = resolve(base, p.value("hi_csv", ""));
      run.paths.embedding_table = resolve(base, p.value("embedding_table", ""));
      run.paths.workdir = resolve(base, p.value("workdir", ""));
    }
    if (j.contains("model")) run.model = model_kind_from_string(j["model"].get<std::string>());
    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      if (p.contains("tail")) run.tail = tail_from_string(p["tail"].get<std::string>());
      if (p.contains("distance")) run.distance = distance_from_string(p["distance"].get<std::string>());
    }
    if (j.contains("train")) run.train = train_config_from_json(j["train"]);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config '" + path.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("config '" + path.string() + "': " + e.what());
  }
  if (const char* env = std::getenv(kWorkdirEnv); env && *env) run.paths.workdir = env;
  if (run.paths.workdir.empty()) run.paths.workdir = base / "work";
  validate(run.train);
  return run;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-immunity prediction from influenza gene sequence pairs"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON run config")->required();
    cmd->add_option("--seed", o.seed, "training seed");
    cmd->add_option("--task", o.task, "binary or multilevel");
    cmd->add_option("--operator", o.op, "mii or concat");
    cmd->add_option("--init", o.init, "pretrained or random");
    cmd->add_option("--epochs", o.epochs, "training epochs");
    cmd->add_option("--model", o.model, "model kind, e.g. dpcipi, bilstm_concat, lr_sim");
    cmd->add_option("--threads", o.threads, "worker threads for batch gradients");
  };

  auto* preprocess = app.add_subcommand("preprocess", "align, deduplicate and split the dataset");
  auto* train = app.add_subcommand("train", "train a model on the preprocessed training split");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  auto* ablate = app.add_subcommand("ablate", "initialization x operator ablation grid");
  auto* predict_cmd = app.add_subcommand("predict", "class probabilities for one sequence pair");
  for (auto* cmd : {preprocess, train, evaluate_cmd, ablate, predict_cmd}) add_common(cmd);
  for (auto* cmd : {train, evaluate_cmd, predict_cmd})
    cmd->add_option("--checkpoint", o.checkpoint, "checkpoint path (default <workdir>/model.json)");
  std::string ref_bases, test_bases;
  predict_cmd->add_option("--reference", ref_bases, "reference strain bases")->required();
  predict_cmd->add_option("--test", test_bases, "test strain bases")->required();

  auto* synth = app.add_subcommand("synth", "write a generated corpus, table and config");
  std::string synth_dir;
  SyntheticOptions synth_opts;
  std::size_t synth_dim = 64, synth_hidden = 32;
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--pairs", synth_opts.pairs, "number of pairs");
  synth->add_option("--length", synth_opts.length, "sequence length");
  synth->add_option("--seed", synth_opts.seed, "generator seed");
  synth->add_option("--dim", synth_dim, "embedding width of the generated table");
  synth->add_option("--hidden", synth_hidden, "hidden width written to the config");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_dir, synth_opts, synth_dim, synth_hidden, out);
    const auto run = apply(load_run_config(o.config), o);
    if (preprocess->parsed()) return cmd_preprocess(run, out);
    if (train->parsed()) return cmd_train(run, o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(run, o, out);
    if (ablate->parsed()) return cmd_ablate(run, o, out);
    if (predict_cmd->parsed()) return cmd_predict(run, o, ref_bases, test_bases, out);
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace dpcipi
