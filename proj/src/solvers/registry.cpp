#include <functional>
#include <map>
#include <set>

#include "seqbench/core/error.hpp"
#include "seqbench/solvers/baseline.hpp"
#include "seqbench/solvers/bo.hpp"
#include "seqbench/solvers/solver.hpp"

namespace seqbench::solvers {

namespace {

/// Reads typed values out of a flat parameter object and rejects leftovers.
class ParamReader {
 public:
  ParamReader(std::string solver, const nlohmann::json& params) : solver_(std::move(solver)), params_(params) {
    if (!params_.is_null() && !params_.is_object()) {
      throw Error(ErrorCode::ConfigError, "solver parameters must be an object");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (params_.is_null() || !params_.contains(key)) return;
    used_.insert(key);
    const auto& v = params_.at(key);
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, int>) {
        if (v.is_number_float()) throw Error(ErrorCode::ConfigError, "expected an integer");
        const auto raw = v.get<long long>();
        if (raw < 0) throw Error(ErrorCode::ConfigError, "expected a non-negative integer");
        out = static_cast<T>(raw);
      } else {
        out = v.get<T>();
      }
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::ConfigError, "solver " + solver_ + ": bad value for '" + key + "'");
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "solver " + solver_ + ": bad value for '" + key + "' (" + e.what() + ")");
    }
  }

  void read_gp(GpSettings& gp) {
    read("gp.n_starts", gp.n_starts);
    read("gp.max_evaluations_per_start", gp.max_evaluations_per_start);
    read("gp.max_fit_points", gp.max_fit_points);
    read("gp.prior_offset", gp.prior_offset);
    read("gp.prior_scale", gp.prior_scale);
    read("gp.xi", gp.xi);
    if (gp.n_starts < 1) throw Error(ErrorCode::ConfigError, "gp.n_starts must be >= 1");
    if (!(gp.prior_scale > 0)) throw Error(ErrorCode::ConfigError, "gp.prior_scale must be positive");
  }

  void finish() const {
    if (params_.is_null()) return;
    for (const auto& [key, value] : params_.items()) {
      if (!used_.count(key)) {
        throw Error(ErrorCode::ConfigError, "solver " + solver_ + " has no parameter '" + key + "'");
      }
    }
  }

 private:
  std::string solver_;
  const nlohmann::json& params_;
  std::set<std::string> used_;
};

using Builder = std::function<std::unique_ptr<Solver>(ParamReader&)>;

const std::map<std::string, std::pair<std::string, Builder>>& registry() {
  static const std::map<std::string, std::pair<std::string, Builder>> table = {
      {"directed_evolution",
       {"DirectedEvolution", [](ParamReader&) { return std::make_unique<DirectedEvolution>(); }}},
      {"hill_climbing",
       {"HillClimbing",
        [](ParamReader& r) {
          double sigma = 0.25;
          r.read("step_sigma", sigma);
          if (sigma < 0) throw Error(ErrorCode::ConfigError, "step_sigma must be >= 0");
          return std::make_unique<HillClimbing>(sigma);
        }}},
      {"genetic_algorithm",
       {"GeneticAlgorithm",
        [](ParamReader& r) {
          GeneticAlgorithmParams p;
          r.read("population_size", p.population_size);
          r.read("tournament_k", p.tournament_k);
          r.read("mutation_rate", p.mutation_rate);
          return std::make_unique<GeneticAlgorithm>(p);
        }}},
      {"cma_es",
       {"CMAES",
        [](ParamReader& r) {
          CmaEsParams p;
          r.read("population_lambda", p.population_lambda);
          r.read("initial_sigma", p.initial_sigma);
          if (!(p.initial_sigma > 0)) throw Error(ErrorCode::ConfigError, "initial_sigma must be positive");
          return std::make_unique<CmaEsSolver>(p);
        }}},
      {"vanilla_bo",
       {"VanillaBO",
        [](ParamReader& r) {
          VanillaBoParams p;
          r.read("pool_size", p.pool.count);
          r.read("n_random", p.pool.n_random);
          r.read("mutation_radius", p.pool.mutation_radius);
          r.read("n_incumbents", p.n_incumbents);
          r.read_gp(p.gp);
          if (p.pool.count == 0) throw Error(ErrorCode::ConfigError, "pool_size must be >= 1");
          return std::make_unique<VanillaBo>(p);
        }}},
      {"turbo",
       {"Turbo",
        [](ParamReader& r) {
          TurboParams p;
          r.read("pool_size", p.pool_size);
          r.read("length_init", p.length_init);
          r.read("length_min", p.length_min);
          r.read("length_max", p.length_max);
          r.read("success_tolerance", p.success_tolerance);
          r.read("failure_tolerance", p.failure_tolerance);
          r.read("restart_samples", p.restart_samples);
          r.read_gp(p.gp);
          if (p.pool_size == 0) throw Error(ErrorCode::ConfigError, "pool_size must be >= 1");
          if (!(p.length_min > 0 && p.length_min <= p.length_init && p.length_init <= p.length_max)) {
            throw Error(ErrorCode::ConfigError, "need 0 < length_min <= length_init <= length_max");
          }
          if (p.success_tolerance == 0) throw Error(ErrorCode::ConfigError, "success_tolerance must be >= 1");
          return std::make_unique<Turbo>(p);
        }}},
      {"random_line_bo",
       {"RandomLineBO",
        [](ParamReader& r) {
          RandomLineBoParams p;
          r.read("steps_per_line", p.steps_per_line);
          r.read("grid_size", p.grid_size);
          r.read("n_starts", p.n_starts);
          r.read("xi", p.xi);
          if (p.steps_per_line == 0) throw Error(ErrorCode::ConfigError, "steps_per_line must be >= 1");
          return std::make_unique<RandomLineBo>(p);
        }}},
  };
  return table;
}

}  // namespace

std::unique_ptr<Solver> make_solver(const std::string& name, const nlohmann::json& params) {
  const auto& table = registry();
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::ConfigError, "unknown solver '" + name + "'");
  ParamReader reader(name, params);
  auto solver = it->second.second(reader);
  reader.finish();
  return solver;
}

std::vector<std::string> solver_names() {
  return {"directed_evolution", "hill_climbing", "cma_es", "genetic_algorithm",
          "vanilla_bo",         "random_line_bo", "turbo"};
}

std::string display_name(const std::string& solver_name) {
  const auto& table = registry();
  const auto it = table.find(solver_name);
  return it == table.end() ? solver_name : it->second.first;
}

}  // namespace seqbench::solvers
