#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/black_box.hpp"
#include "seqbench/core/rng.hpp"
#include "seqbench/ehrlich/ehrlich.hpp"

namespace seqbench {

/// A problem family name plus its parameters. Families: "ehrlich" and
/// "pest_control_equiv" (Ehrlich with |A|=5, L=25 and one motif of length 25).
struct ProblemConfig {
  std::string family = "ehrlich";
  ehrlich::EhrlichConfig ehrlich;
  /// Oracle seed. When absent the replication seed generates the oracle.
  std::optional<std::uint64_t> seed;

  bool operator==(const ProblemConfig&) const = default;
};

/// Resolves family defaults; throws UnknownProblem or InfeasibleConfig.
ehrlich::EhrlichConfig resolve_family(const ProblemConfig& config);

std::vector<std::string> problem_families();

using InitialData = std::vector<std::pair<Sequence, double>>;
using SequenceSampler = std::function<Sequence(Rng&)>;

struct ProblemOptions {
  std::size_t budget = 300;
  std::size_t n_init = 10;
  Observer* observer = nullptr;
  TimingMode timing = TimingMode::None;
  /// Overrides the in-process backend, for example with a remote client.
  std::shared_ptr<EvaluationBackend> backend;
};

struct Problem {
  std::shared_ptr<const ehrlich::EhrlichOracle> oracle;
  /// Initial data is charged here, never to the solver budget.
  BlackBoxHandle init_black_box;
  BlackBoxHandle black_box;
  InitialData init_data;
  /// The family's initializer (Markov chain samples for Ehrlich).
  SequenceSampler sampler;
  nlohmann::json metadata;
};

/// Identical (config, seed) yields an identical oracle and initial data.
Problem create_problem(const ProblemConfig& config, std::uint64_t seed,
                       const ProblemOptions& options = {});

}  // namespace seqbench
