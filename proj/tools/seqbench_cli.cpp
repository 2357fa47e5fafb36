// seqbench: run, aggregate, serve and inspect Ehrlich benchmark experiments.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqbench/core/error.hpp"
#include "seqbench/harness/aggregate.hpp"
#include "seqbench/harness/brute_force.hpp"
#include "seqbench/harness/config.hpp"
#include "seqbench/harness/experiment.hpp"
#include "seqbench/isolation/remote.hpp"

namespace {

using namespace seqbench;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitProtocol = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownProblem:
    case ErrorCode::InfeasibleConfig:
    case ErrorCode::InstanceTooLarge:
      return kExitConfig;
    case ErrorCode::ProtocolError:
    case ErrorCode::ConnectionClosed:
    case ErrorCode::ConnectionError:
    case ErrorCode::RemoteError:
    case ErrorCode::PayloadTooLarge:
      return kExitProtocol;
    default:
      return kExitRuntime;
  }
}

std::uint16_t default_port() {
  if (const char* env = std::getenv("SEQBENCH_PORT"); env != nullptr && *env != '\0') {
    return isolation::parse_endpoint(std::string(":") + env).port;
  }
  return 7878;
}

std::shared_ptr<const ehrlich::EhrlichOracle> load_oracle(const harness::ExperimentConfig& cfg,
                                                          std::uint64_t seed) {
  const auto family = resolve_family(cfg.problem);
  return std::make_shared<const ehrlich::EhrlichOracle>(
      ehrlich::EhrlichOracle::generate(family, cfg.problem.seed.value_or(seed)));
}

int cmd_run(const std::string& config_path, const std::string& out, const std::string& remote) {
  auto cfg = harness::load_config(config_path);
  if (!out.empty()) cfg.output_dir = out;
  if (!remote.empty()) cfg.remote = remote;
  const auto records = harness::run_experiment(cfg);
  int code = kExitOk;
  for (const auto& r : records) {
    if (r.ok()) {
      std::printf("seed %llu  best %.4f  calls %zu  %s\n", static_cast<unsigned long long>(r.summary.seed),
                  r.summary.best_score, r.summary.total_calls, r.directory.c_str());
    } else {
      std::printf("seed %llu  FAILED  %s\n", static_cast<unsigned long long>(r.summary.seed),
                  r.summary.error.c_str());
      code = kExitRuntime;
    }
  }
  return code;
}

int cmd_aggregate(const std::vector<std::string>& dirs, const std::string& format, const std::string& out) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const auto table = harness::aggregate(harness::collect_summaries(paths));
  for (const auto& [solver, task] : table.missing) {
    std::fprintf(stderr, "missing group: %s / %s\n", solver.c_str(), task.c_str());
  }
  const auto text =
      harness::emit_table(table, format == "csv" ? harness::TableFormat::Csv : harness::TableFormat::Markdown);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream file(out);
    file << text;
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + out);
  }
  return kExitOk;
}

int cmd_serve(const std::string& config_path, std::uint64_t seed, const std::string& host, std::uint16_t port,
              bool allow_non_loopback) {
  const auto cfg = harness::load_config(config_path);
  const auto oracle = load_oracle(cfg, seed);
  isolation::ServeOptions options;
  options.allow_non_loopback = allow_non_loopback;
  options.on_listening = [&](std::uint16_t bound) {
    std::printf("serving %s on %s:%u\n", oracle->info().name.c_str(), host.c_str(), bound);
    std::fflush(stdout);
  };
  isolation::serve_blackbox(oracle, {host, port}, options);
  return kExitOk;
}

int cmd_brute_force(const std::string& config_path, std::uint64_t seed, std::uint64_t bound) {
  const auto cfg = harness::load_config(config_path);
  const auto oracle = load_oracle(cfg, seed);
  const auto result = harness::brute_force(*oracle, bound);
  nlohmann::json doc{{"problem", oracle->info().name},
                     {"evaluations", result.evaluations},
                     {"max_score", result.max_score},
                     {"argmax_count", result.argmax_count},
                     {"histogram", result.histogram}};
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_optimum(const std::string& config_path, std::uint64_t seed) {
  const auto cfg = harness::load_config(config_path);
  const auto oracle = load_oracle(cfg, seed);
  const auto best = oracle->construct_optimum();
  std::printf("%s\t%.6f\n", render(best, oracle->info().alphabet).c_str(), oracle->score(best));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ehrlich sequence-design benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string remote;
  auto* run = app.add_subcommand("run", "Run every seed of an experiment config");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output root (default: config, then $SEQBENCH_OUT, then ./runs)");
  run->add_option("--remote", remote, "host:port of a served black box");

  std::vector<std::string> dirs;
  std::string format = "markdown";
  auto* agg = app.add_subcommand("aggregate", "Build the results table from run directories");
  agg->add_option("dirs", dirs, "Directories holding summary.json files")->required();
  agg->add_option("--format", format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  agg->add_option("--out", out, "Output file (default: stdout)");

  std::uint64_t seed = 0;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  bool allow_non_loopback = false;
  auto* serve = app.add_subcommand("serve", "Serve the configured black box over a local socket");
  serve->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Port (default: $SEQBENCH_PORT, then 7878; 0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--seed", seed, "Oracle seed when the config has none");
  serve->add_flag("--allow-non-loopback", allow_non_loopback, "Permit binding a non-loopback address");

  std::uint64_t bound = 1'000'000;
  auto* brute = app.add_subcommand("brute-force", "Enumerate every sequence of a small instance");
  brute->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  brute->add_option("--seed", seed, "Oracle seed when the config has none");
  brute->add_option("--bound", bound, "Largest |A|^L to enumerate");

  auto* optimum = app.add_subcommand("optimum", "Print a constructed optimum and its score");
  optimum->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  optimum->add_option("--seed", seed, "Oracle seed when the config has none");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out, remote);
    if (*agg) return cmd_aggregate(dirs, format, out);
    if (*serve) {
      if (serve->count("--port") == 0) port = default_port();
      return cmd_serve(config_path, seed, host, port, allow_non_loopback);
    }
    if (*brute) return cmd_brute_force(config_path, seed, bound);
    if (*optimum) return cmd_optimum(config_path, seed);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
