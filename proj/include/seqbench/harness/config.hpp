#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/black_box.hpp"
#include "seqbench/core/problem.hpp"

namespace seqbench::harness {

/// One experiment: a problem, a solver and the replication protocol.
///
/// Plain-text form, one `key = value` per line, `#` starts a comment:
///
///   problem.family = ehrlich
///   problem.sequence_length = 15
///   solver.name = turbo
///   solver.pool_size = 256
///   run.seeds = 0, 1, 2, 3, 4
///
/// problem.*: family, alphabet_size, sequence_length, n_motifs,
///   motif_length, quantization, sparsity, name, seed
/// solver.*: name, plus any parameter the solver accepts
/// run.*: seeds, budget, n_init, output_dir, remote, parallel, timing
struct ExperimentConfig {
  ProblemConfig problem;
  std::string solver = "directed_evolution";
  /// Flat solver parameters, keys without the "solver." prefix.
  nlohmann::json solver_params = nlohmann::json::object();
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t budget = 300;
  std::size_t n_init = 10;
  /// Empty means: SEQBENCH_OUT, else "runs".
  std::string output_dir;
  /// host:port of a served black box; evaluations go there when set.
  std::optional<std::string> remote;
  /// Concurrent seeds; 0 means min(#seeds, hardware threads).
  std::size_t parallel = 0;
  TimingMode timing = TimingMode::None;

  bool operator==(const ExperimentConfig& other) const;
};

/// Throws ConfigError naming the line for syntax errors, unknown keys,
/// duplicate keys and bad values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

/// Problem parameters as a JSON document (what metadata records).
nlohmann::json problem_config_to_json(const ProblemConfig& config);

/// Checks the problem and solver before any evaluation. Throws ConfigError
/// (or UnknownProblem / InfeasibleConfig).
void validate_config(const ExperimentConfig& config);

/// Output root: the config value, else SEQBENCH_OUT, else "runs".
std::filesystem::path output_root(const ExperimentConfig& config);

}  // namespace seqbench::harness
