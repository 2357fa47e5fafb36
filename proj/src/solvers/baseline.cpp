#include "seqbench/solvers/baseline.hpp"

#include <algorithm>
#include <numeric>

#include "seqbench/core/error.hpp"
#include "seqbench/embedding/one_hot.hpp"
#include "seqbench/solvers/cma_es.hpp"

namespace seqbench::solvers {

SolveResult DirectedEvolution::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/directed_evolution");
  const std::size_t alphabet = campaign.info().alphabet.size();
  Incumbent current = campaign.initial_incumbent(rng);
  while (!campaign.done()) {
    Sequence proposal = mutate_one(current.sequence, alphabet, rng);
    const auto score = campaign.evaluate(proposal);
    if (!score) break;
    if (*score > current.score) current = {std::move(proposal), *score};
  }
  return campaign.finish();
}

SolveResult HillClimbing::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/hill_climbing");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const Incumbent start = campaign.initial_incumbent(rng);
  Eigen::VectorXd z = one_hot_encode(start.sequence, alphabet);
  double z_score = start.score;
  Eigen::VectorXd step(z.size());
  while (!campaign.done()) {
    for (Eigen::Index i = 0; i < step.size(); ++i) step[i] = standard_normal(rng);
    Eigen::VectorXd proposal = clip_unit(z + step_sigma_ * step);
    const auto score = campaign.evaluate(one_hot_decode(proposal, length, alphabet));
    if (!score) break;
    if (*score > z_score) {
      z = std::move(proposal);
      z_score = *score;
    }
  }
  return campaign.finish();
}

std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng) {
  std::size_t best = uniform_index(rng, fitness.size());
  for (std::size_t i = 1; i < k; ++i) {
    const std::size_t other = uniform_index(rng, fitness.size());
    if (fitness[other] > fitness[best]) best = other;
  }
  return best;
}

Sequence uniform_crossover(const Sequence& a, const Sequence& b, Rng& rng) {
  Sequence child = a;
  for (std::size_t i = 0; i < child.size(); ++i) {
    if (rng() & 1ULL) child[i] = b[i];
  }
  return child;
}

Sequence mutate_positions(const Sequence& seq, double rate, std::size_t alphabet_size, Rng& rng) {
  Sequence out = seq;
  if (rate <= 0.0 || alphabet_size < 2) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (uniform01(rng) < rate) {
      auto token = static_cast<Token>(uniform_index(rng, alphabet_size - 1));
      if (token >= out[i]) ++token;
      out[i] = token;
    }
  }
  return out;
}

GeneticAlgorithm::GeneticAlgorithm(GeneticAlgorithmParams params) : params_(params) {
  if (params_.population_size < 2) {
    throw Error(ErrorCode::ConfigError, "population_size must be >= 2");
  }
  if (params_.tournament_k < 1) throw Error(ErrorCode::ConfigError, "tournament_k must be >= 1");
  if (params_.mutation_rate > 1.0) throw Error(ErrorCode::ConfigError, "mutation_rate must be <= 1");
}

nlohmann::json GeneticAlgorithm::hyperparameters() const {
  return {{"population_size", params_.population_size},
          {"tournament_k", params_.tournament_k},
          {"mutation_rate", params_.mutation_rate < 0 ? nlohmann::json("1/L")
                                                      : nlohmann::json(params_.mutation_rate)}};
}

SolveResult GeneticAlgorithm::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/genetic_algorithm");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const double rate = params_.mutation_rate < 0 ? 1.0 / static_cast<double>(length) : params_.mutation_rate;

  // Best init points first, padded with fresh samples.
  std::vector<std::size_t> order(config.init_data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return config.init_data[a].second > config.init_data[b].second;
  });
  std::vector<Sequence> population;
  std::vector<double> fitness;
  for (std::size_t i = 0; i < order.size() && population.size() < params_.population_size; ++i) {
    population.push_back(config.init_data[order[i]].first);
    fitness.push_back(config.init_data[order[i]].second);
  }
  std::vector<Sequence> padding;
  while (population.size() + padding.size() < params_.population_size) {
    padding.push_back(campaign.sample(rng));
  }
  const auto padded = campaign.evaluate(padding);
  for (std::size_t i = 0; i < padded.size(); ++i) {
    population.push_back(padding[i]);
    fitness.push_back(padded[i]);
  }

  while (!campaign.done() && population.size() >= 2) {
    const auto elite = static_cast<std::size_t>(
        std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    std::vector<Sequence> children;
    children.reserve(params_.population_size - 1);
    while (children.size() + 1 < params_.population_size) {
      const auto& a = population[tournament_select(fitness, params_.tournament_k, rng)];
      const auto& b = population[tournament_select(fitness, params_.tournament_k, rng)];
      children.push_back(mutate_positions(uniform_crossover(a, b, rng), rate, alphabet, rng));
    }
    const auto scores = campaign.evaluate(children);
    std::vector<Sequence> next{population[elite]};
    std::vector<double> next_fitness{fitness[elite]};
    for (std::size_t i = 0; i < scores.size(); ++i) {
      next.push_back(std::move(children[i]));
      next_fitness.push_back(scores[i]);
    }
    population = std::move(next);
    fitness = std::move(next_fitness);
  }
  return campaign.finish();
}

nlohmann::json CmaEsSolver::hyperparameters() const {
  return {{"population_lambda", params_.population_lambda == 0 ? nlohmann::json("4+floor(3 ln D)")
                                                               : nlohmann::json(params_.population_lambda)},
          {"initial_sigma", params_.initial_sigma}};
}

SolveResult CmaEsSolver::solve(BlackBoxHandle& handle, const SolverRunConfig& config) {
  Campaign campaign(handle, config);
  Rng rng = make_rng(config.seed, "solver/cma_es");
  const std::size_t alphabet = campaign.info().alphabet.size();
  const std::size_t length = campaign.info().sequence_length;
  const Incumbent start = campaign.initial_incumbent(rng);
  CmaEs es(one_hot_encode(start.sequence, alphabet), params_.initial_sigma, params_.population_lambda);

  while (!campaign.done()) {
    const auto samples = es.ask(rng);
    std::vector<Sequence> decoded;
    decoded.reserve(samples.size());
    for (const auto& x : samples) decoded.push_back(one_hot_decode(clip_unit(x), length, alphabet));
    const auto scores = campaign.evaluate(decoded);
    if (scores.size() < samples.size()) break;
    es.tell(samples, scores);
  }
  if (es.repairs() > 0) {
    campaign.note("covariance repaired by eigenvalue flooring " + std::to_string(es.repairs()) + " times");
  }
  return campaign.finish();
}

}  // namespace seqbench::solvers
