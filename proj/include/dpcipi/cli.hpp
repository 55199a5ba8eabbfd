#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpcipi/kmer.hpp"
#include "dpcipi/models/config.hpp"

namespace dpcipi {

struct RunPaths {
  std::filesystem::path fasta;
  std::filesystem::path hi_csv;
  std::filesystem::path embedding_table;
  std::filesystem::path workdir;
};

// Everything a pipeline command reads from the JSON config file.
//
//   {"paths": {"fasta", "hi_csv", "embedding_table", "workdir"},
//    "model": "dpcipi",
//    "preprocess": {"tail": "keep", "distance": "hamming_with_overhang"},
//    "train": {<TrainConfig fields>}}
//
// Relative paths resolve against the config file's directory. The
// DPCIPI_WORKDIR environment variable replaces paths.workdir.
struct RunConfig {
  RunPaths paths;
  ModelKind model = ModelKind::dpcipi;
  TailMode tail = TailMode::keep;
  DistanceRule distance = DistanceRule::hamming_with_overhang;
  TrainConfig train;
};

inline constexpr const char* kWorkdirEnv = "DPCIPI_WORKDIR";

RunConfig load_run_config(const std::filesystem::path& path);

// Exit codes: 0 success, 1 internal error, 2 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dpcipi
