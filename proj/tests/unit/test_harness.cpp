#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "seqbench/core/error.hpp"
#include "seqbench/harness/aggregate.hpp"
#include "seqbench/harness/brute_force.hpp"
#include "seqbench/harness/config.hpp"
#include "seqbench/harness/experiment.hpp"
#include "support/server_thread.hpp"
#include "support/temp_dir.hpp"

using namespace seqbench;
using namespace seqbench::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

observer::RunSummary record(const std::string& solver, const std::string& task, std::uint64_t seed, double best) {
  observer::RunSummary s;
  s.solver = solver;
  s.task = task;
  s.seed = seed;
  s.best_score = best;
  return s;
}

ExperimentConfig small_experiment(const std::filesystem::path& out, const std::string& solver) {
  ExperimentConfig cfg;
  cfg.problem.ehrlich.sequence_length = 5;
  cfg.problem.ehrlich.n_motifs = 1;
  cfg.problem.ehrlich.motif_length = 4;
  cfg.solver = solver;
  cfg.budget = 40;
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing and round trip") {
  const std::string text = R"(# Ehrlich, medium
problem.family = ehrlich
problem.sequence_length = 15
problem.n_motifs = 2
problem.motif_length = 7
solver.name = turbo
solver.pool_size = 256
solver.gp.prior_scale = 0.5
run.seeds = 0, 1, 2
run.budget = 120
run.timing = wall
)";
  const auto cfg = parse_config(text);
  CHECK(cfg.problem.ehrlich.sequence_length == 15);
  CHECK(cfg.solver == "turbo");
  CHECK(cfg.solver_params.at("pool_size") == 256);
  CHECK(cfg.solver_params.at("gp.prior_scale") == 0.5);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(cfg.budget == 120);
  CHECK(cfg.n_init == 10);
  CHECK(cfg.timing == TimingMode::Wall);
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  CHECK(serialize_config(parse_config(serialize_config(cfg))) == serialize_config(cfg));
  CHECK_NOTHROW(validate_config(cfg));

  ExperimentConfig with_all = cfg;
  with_all.problem.seed = 99;
  with_all.remote = "127.0.0.1:7000";
  with_all.output_dir = "/tmp/x";
  with_all.problem.ehrlich.name = "Custom";
  with_all.solver_params["flag"] = true;
  with_all.solver_params["label"] = "abc";
  CHECK(parse_config(serialize_config(with_all)) == with_all);
}

TEST_CASE("config errors name the line") {
  auto message_of = [](const std::string& text) {
    try {
      (void)parse_config(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      return std::string(e.what());
    }
    FAIL("expected ConfigError");
    return std::string();
  };
  CHECK(message_of("run.budget = 10\nproblem.colour = red\n").find("line 2") != std::string::npos);
  CHECK(message_of("run.budget = 10\nrun.budget = 20\n").find("line 2") != std::string::npos);
  CHECK(message_of("run.budget = ten\n").find("line 1") != std::string::npos);
  CHECK(message_of("just words\n").find("line 1") != std::string::npos);
  CHECK(message_of("run.seeds = 1, x\n").find("line 1") != std::string::npos);
}

TEST_CASE("validation happens before any evaluation") {
  testsupport::TempDir tmp;
  auto cfg = small_experiment(tmp.path(), "annealing");
  CHECK(code_of([&] { (void)run_experiment(cfg); }) == ErrorCode::ConfigError);
  CHECK(std::filesystem::is_empty(tmp.path()));
  cfg.solver = "genetic_algorithm";
  cfg.solver_params = {{"tournament", 2}};
  CHECK(code_of([&] { (void)run_experiment(cfg); }) == ErrorCode::ConfigError);
  cfg.solver_params = nlohmann::json::object();
  cfg.problem.family = "protein";
  CHECK(code_of([&] { (void)run_experiment(cfg); }) == ErrorCode::UnknownProblem);
  CHECK(std::filesystem::is_empty(tmp.path()));
}

TEST_CASE("output root precedence") {
  ExperimentConfig cfg;
  ::unsetenv("SEQBENCH_OUT");
  CHECK(output_root(cfg) == "runs");
  ::setenv("SEQBENCH_OUT", "/tmp/from_env", 1);
  CHECK(output_root(cfg) == "/tmp/from_env");
  cfg.output_dir = "/tmp/from_config";
  CHECK(output_root(cfg) == "/tmp/from_config");
  ::unsetenv("SEQBENCH_OUT");
}

TEST_CASE("five seeds give five run directories, reproducibly") {
  testsupport::TempDir a, b;
  auto cfg = small_experiment(a.path(), "genetic_algorithm");
  const auto first = run_experiment(cfg);
  REQUIRE(first.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(first[i].ok());
    CHECK(first[i].summary.seed == i);
    CHECK(std::filesystem::exists(first[i].directory / observer::kSummaryFile));
    CHECK(first[i].directory == a.path() / "Ehrlich_L-5" / "genetic_algorithm" / ("seed_" + std::to_string(i)));
    CHECK(first[i].summary.total_calls == 40);
  }
  cfg.output_dir = b.path().string();
  cfg.parallel = 1;
  const auto second = run_experiment(cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(slurp(first[i].directory / observer::kEventsFile) == slurp(second[i].directory / observer::kEventsFile));
    CHECK(first[i].summary.trajectory == second[i].summary.trajectory);
  }
  // The same directory cannot be written twice.
  cfg.output_dir = a.path().string();
  const auto again = run_experiment(cfg);
  for (const auto& r : again) CHECK_FALSE(r.ok());
}

TEST_CASE("task names") {
  ProblemConfig pc;
  pc.ehrlich.sequence_length = 64;
  CHECK(task_name(pc) == "Ehrlich(L=64)");
  pc.family = "pest_control_equiv";
  CHECK(task_name(pc) == "PestControlEquiv");
}

TEST_CASE("local and remote runs produce identical event streams") {
  const std::vector<std::pair<std::string, std::uint64_t>> pairs{
      {"directed_evolution", 0}, {"genetic_algorithm", 1}, {"cma_es", 2}};
  for (const auto& [solver, seed] : pairs) {
    CAPTURE(solver);
    testsupport::TempDir local_dir, remote_dir;
    auto cfg = small_experiment(local_dir.path(), solver);
    const auto local = run_replication(cfg, seed, local_dir.path());
    REQUIRE(local.ok());

    const auto oracle = std::make_shared<const ehrlich::EhrlichOracle>(
        ehrlich::EhrlichOracle::generate(resolve_family(cfg.problem), seed));
    testsupport::ServerThread server(oracle);
    cfg.remote = server.endpoint().to_string();
    const auto remote = run_replication(cfg, seed, remote_dir.path());
    REQUIRE(remote.ok());
    CHECK(slurp(local.directory / observer::kEventsFile) == slurp(remote.directory / observer::kEventsFile));
    CHECK(local.summary.trajectory == remote.summary.trajectory);
    CHECK(std::filesystem::exists(remote.directory / observer::kRemoteLogFile));
  }
}

TEST_CASE("aggregation") {
  SUBCASE("five perfect runs") {
    std::vector<observer::RunSummary> rs;
    for (std::uint64_t s = 0; s < 5; ++s) rs.push_back(record("directed_evolution", "Ehrlich(L=5)", s, 1.0));
    const auto t = aggregate(rs);
    REQUIRE(t.cells[0][0]);
    CHECK(format_cell(*t.cells[0][0]) == "1.000 \xC2\xB1 0.00");
    CHECK(t.solvers[0] == "DirectedEvolution");
  }
  SUBCASE("min-max normalization") {
    const auto t = aggregate({record("turbo", "T", 0, 1.0), record("cma_es", "T", 0, 0.0)});
    CHECK(*t.normalized[0][0] == 1.0);
    CHECK(*t.normalized[1][0] == 0.0);
  }
  SUBCASE("a constant column normalizes to zero") {
    const auto t = aggregate({record("turbo", "T", 0, 0.0), record("cma_es", "T", 0, 0.0),
                              record("turbo", "U", 0, 0.5), record("cma_es", "U", 0, 0.25)});
    CHECK(*t.normalized[0][0] == 0.0);
    CHECK(*t.normalized[1][0] == 0.0);
    CHECK(t.normalized_sum[0] == 1.0);
    CHECK(t.normalized_sum[1] == 0.0);
  }
  SUBCASE("sample standard deviation") {
    const auto t = aggregate({record("turbo", "T", 0, 0.0), record("turbo", "T", 1, 1.0)});
    CHECK(t.cells[0][0]->std == doctest::Approx(std::sqrt(0.5)));
  }
  SUBCASE("missing groups and failed runs") {
    auto failed = record("cma_es", "U", 0, 0.9);
    failed.status = "failed";
    const auto t = aggregate({record("turbo", "T", 0, 0.5), record("cma_es", "T", 0, 0.2), failed});
    REQUIRE(t.missing.size() == 2);
    CHECK(t.missing[0] == std::pair<std::string, std::string>{"Turbo", "U"});
    CHECK(t.missing[1] == std::pair<std::string, std::string>{"CMAES", "U"});
  }
}

TEST_CASE("table output") {
  std::vector<observer::RunSummary> rs;
  const double vals[] = {0.1234567891234, 0.2, 0.30000000000000004, 0.7, 0.95};
  for (std::uint64_t s = 0; s < 5; ++s) {
    rs.push_back(record("genetic_algorithm", "Ehrlich(L=5)", s, vals[s]));
    rs.push_back(record("directed_evolution", "Ehrlich(L=5)", s, 1.0));
    rs.push_back(record("directed_evolution", "Ehrlich(L=15)", s, 0.5 + 0.01 * static_cast<double>(s)));
  }
  const auto t = aggregate(rs);
  const auto md = emit_table(t, TableFormat::Markdown);
  CHECK(md.find("| Solver | Ehrlich(L=5) | Ehrlich(L=15) | Sum (normalized per row) |") == 0);
  CHECK(md.find("| DirectedEvolution | 1.000 \xC2\xB1 0.00 | 0.520 \xC2\xB1 0.02 | 1.00 |") != std::string::npos);
  CHECK(md.find("| GeneticAlgorithm | 0.455 \xC2\xB1 0.35 |  | 0.00 |") != std::string::npos);

  const auto csv = emit_table(t, TableFormat::Csv);
  const auto back = parse_csv_table(csv);
  CHECK(back.solvers == t.solvers);
  CHECK(back.tasks == t.tasks);
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    CHECK(back.normalized_sum[s] == t.normalized_sum[s]);
    for (std::size_t k = 0; k < t.tasks.size(); ++k) {
      REQUIRE(back.cells[s][k].has_value() == t.cells[s][k].has_value());
      if (!t.cells[s][k]) continue;
      CHECK(back.cells[s][k]->mean == t.cells[s][k]->mean);
      CHECK(back.cells[s][k]->std == t.cells[s][k]->std);
      CHECK(back.cells[s][k]->n == t.cells[s][k]->n);
    }
  }
  CHECK(emit_table(back, TableFormat::Csv) == csv);

  const ResultsTable empty = aggregate({});
  CHECK(emit_table(empty, TableFormat::Markdown) == "| Solver | Sum (normalized per row) |\n|---|---|\n");
  CHECK(emit_table(empty, TableFormat::Csv) == "solver,Sum (normalized per row)\n");
  CHECK(parse_csv_table(emit_table(empty, TableFormat::Csv)).solvers.empty());
}

TEST_CASE("summaries are collected from run directories") {
  testsupport::TempDir tmp;
  auto cfg = small_experiment(tmp.path(), "directed_evolution");
  cfg.seeds = {0, 1};
  (void)run_experiment(cfg);
  const auto found = collect_summaries({tmp.path()});
  REQUIRE(found.size() == 2);
  CHECK(found[0].seed == 0);
  CHECK(found[1].task == "Ehrlich(L=5)");
  CHECK(code_of([&] { (void)collect_summaries({tmp.path() / "nope"}); }) == ErrorCode::IoError);
}

TEST_CASE("brute force") {
  ehrlich::EhrlichConfig c;
  c.alphabet_size = 3;
  c.sequence_length = 4;
  c.n_motifs = 1;
  c.motif_length = 2;
  const auto oracle = ehrlich::EhrlichOracle::generate(c, 0);
  const auto r = brute_force(oracle);
  CHECK(r.evaluations == 81);
  std::size_t mass = 0;
  for (auto h : r.histogram) mass += h;
  CHECK(mass == 81);
  CHECK(r.max_score == 1.0);
  CHECK(r.argmax_count == r.histogram.back());

  ehrlich::EhrlichConfig big;
  CHECK(code_of([&] { (void)brute_force(ehrlich::EhrlichOracle::generate(big, 0)); }) == ErrorCode::InstanceTooLarge);
  CHECK(code_of([&] { (void)brute_force(oracle, 80); }) == ErrorCode::InstanceTooLarge);
}
