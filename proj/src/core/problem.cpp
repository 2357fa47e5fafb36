#include "seqbench/core/problem.hpp"

#include <algorithm>

#include "seqbench/core/error.hpp"

namespace seqbench {

ehrlich::EhrlichConfig resolve_family(const ProblemConfig& config) {
  if (config.family == "ehrlich") {
    return config.ehrlich;
  }
  if (config.family == "pest_control_equiv") {
    ehrlich::EhrlichConfig c = config.ehrlich;
    c.alphabet_size = 5;
    c.sequence_length = 25;
    c.n_motifs = 1;
    c.motif_length = 25;
    if (c.name.empty()) c.name = "PestControlEquiv";
    return c;
  }
  throw Error(ErrorCode::UnknownProblem, "unknown problem family '" + config.family + "'");
}

std::vector<std::string> problem_families() { return {"ehrlich", "pest_control_equiv"}; }

Problem create_problem(const ProblemConfig& config, std::uint64_t seed,
                       const ProblemOptions& options) {
  const auto family = resolve_family(config);
  const std::uint64_t oracle_seed = config.seed.value_or(seed);
  auto oracle = std::make_shared<const ehrlich::EhrlichOracle>(
      ehrlich::EhrlichOracle::generate(family, oracle_seed));

  std::shared_ptr<EvaluationBackend> backend =
      options.backend ? options.backend : std::make_shared<LocalBackend>(oracle);
  if (options.backend && !(options.backend->info() == oracle->info())) {
    throw Error(ErrorCode::ConfigError, "remote black box does not match the configured problem");
  }

  SequenceSampler sampler = [oracle](Rng& rng) {
    return ehrlich::sample_chain(oracle->matrix(), oracle->info().sequence_length, rng);
  };

  Problem problem{oracle,
                  BlackBoxHandle(backend, options.n_init, "init"),
                  BlackBoxHandle(backend, options.budget, "solve"),
                  {},
                  sampler,
                  oracle->to_json()};
  problem.metadata["family"] = config.family;

  for (auto* h : {&problem.init_black_box, &problem.black_box}) {
    h->set_observer(options.observer);
    h->set_timing(options.timing);
  }

  Rng init_rng = make_rng(seed, "init");
  std::vector<Sequence> init;
  init.reserve(options.n_init);
  for (std::size_t i = 0; i < options.n_init; ++i) init.push_back(sampler(init_rng));
  const auto scores = problem.init_black_box.evaluate(init);
  for (std::size_t i = 0; i < init.size(); ++i) {
    problem.init_data.emplace_back(std::move(init[i]), scores[i]);
  }
  if (!scores.empty()) {
    problem.black_box.seed_best(*std::max_element(scores.begin(), scores.end()));
  }
  return problem;
}

}  // namespace seqbench
