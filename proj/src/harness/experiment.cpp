#include "seqbench/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "seqbench/core/error.hpp"
#include "seqbench/core/version.hpp"
#include "seqbench/isolation/remote.hpp"
#include "seqbench/solvers/solver.hpp"

namespace seqbench::harness {

namespace fs = std::filesystem;

std::string task_name(const ProblemConfig& config) {
  const auto family = resolve_family(config);
  if (!family.name.empty()) return family.name;
  return "Ehrlich(L=" + std::to_string(family.sequence_length) + ")";
}

namespace {

std::string path_safe(const std::string& label) {
  std::string out;
  for (const char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') {
      out += c;
    } else if (c == '=') {
      out += '-';
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "task" : out;
}

}  // namespace

fs::path run_directory(const fs::path& root, const ExperimentConfig& config, std::uint64_t seed) {
  return root / path_safe(task_name(config.problem)) / config.solver / ("seed_" + std::to_string(seed));
}

RunRecord run_replication(const ExperimentConfig& config, std::uint64_t seed, const fs::path& root) {
  RunRecord record;
  record.directory = run_directory(root, config, seed);
  auto& summary = record.summary;
  summary.solver = config.solver;
  summary.seed = seed;
  const auto started = std::chrono::steady_clock::now();
  std::unique_ptr<observer::FileObserver> obs;

  try {
    summary.task = task_name(config.problem);
    const auto family = resolve_family(config.problem);
    const auto oracle = ehrlich::EhrlichOracle::generate(family, config.problem.seed.value_or(seed));
    auto solver = solvers::make_solver(config.solver, config.solver_params);

    auto& meta = record.metadata;
    meta.problem = oracle.to_json();
    meta.problem["family"] = config.problem.family;
    meta.problem_config = problem_config_to_json(config.problem);
    meta.solver = config.solver;
    meta.solver_hyperparameters = solver->hyperparameters();
    meta.seed = seed;
    meta.budget = config.budget;
    meta.n_init = config.n_init;
    meta.artifact_version = kArtifactVersion;
    meta.start_time = observer::utc_timestamp();
    obs = observer::initialize_observer(meta, record.directory);

    ProblemOptions options;
    options.budget = config.budget;
    options.n_init = config.n_init;
    options.observer = obs.get();
    options.timing = config.timing;
    if (config.remote) {
      options.backend = isolation::RemoteBackend::connect(isolation::parse_endpoint(*config.remote));
    }
    Problem problem = create_problem(config.problem, seed, options);

    solvers::SolverRunConfig run;
    run.seed = seed;
    run.budget = config.budget;
    run.init_data = problem.init_data;
    run.sampler = problem.sampler;
    const auto result = solver->solve(problem.black_box, run);

    summary.trajectory = result.trajectory;
    summary.best_score = problem.black_box.best().value_or(0.0);
    if (!summary.trajectory.empty()) summary.best_score = summary.trajectory.back();
    summary.total_calls = problem.black_box.ledger().consumed();
    summary.init_calls = problem.init_black_box.ledger().consumed();
    summary.status = "ok";
  } catch (const std::exception& e) {
    summary.status = "failed";
    summary.error = e.what();
  }

  summary.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  summary.end_time = observer::utc_timestamp();
  if (obs) {
    try {
      obs->finalize(summary);
    } catch (const std::exception& e) {
      summary.status = "failed";
      summary.error = e.what();
    }
  }
  return record;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const fs::path root = output_root(config);
  std::vector<RunRecord> records(config.seeds.size());

  std::size_t workers = config.parallel;
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, config.seeds.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      records[i] = run_replication(config, config.seeds[i], root);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

}  // namespace seqbench::harness
