#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "seqbench/harness/config.hpp"
#include "seqbench/observer/observer.hpp"

namespace seqbench::harness {

struct RunRecord {
  observer::RunMetadata metadata;
  observer::RunSummary summary;
  std::filesystem::path directory;

  bool ok() const noexcept { return summary.status == "ok"; }
};

/// Task label used for table columns, e.g. "Ehrlich(L=15)".
std::string task_name(const ProblemConfig& config);

/// <root>/<task>/<solver>/seed_<seed>, with the task label made path-safe.
std::filesystem::path run_directory(const std::filesystem::path& root, const ExperimentConfig& config,
                                    std::uint64_t seed);

/// Runs a single replication and writes its run directory. Failures are
/// returned as a record with status "failed".
RunRecord run_replication(const ExperimentConfig& config, std::uint64_t seed,
                          const std::filesystem::path& root);

/// Validates first (throws ConfigError before any evaluation), then runs
/// every seed, possibly in parallel. Records come back in seed order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

}  // namespace seqbench::harness
