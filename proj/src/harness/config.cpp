#include "seqbench/harness/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqbench/core/error.hpp"
#include "seqbench/solvers/solver.hpp"

namespace seqbench::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + what);
}

std::optional<std::uint64_t> as_uint(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) return std::nullopt;
  return out;
}

std::optional<double> as_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) return std::nullopt;
  return out;
}

/// Integers, then reals, then booleans; anything else stays a string.
nlohmann::json typed_value(const std::string& v) {
  if (!v.empty() && v[0] == '-') {
    if (auto u = as_uint(v.substr(1))) return -static_cast<std::int64_t>(*u);
  } else if (auto u = as_uint(v)) {
    return *u;
  }
  if (auto d = as_double(v)) return *d;
  if (v == "true") return true;
  if (v == "false") return false;
  return v;
}

std::string render_value(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return problem == o.problem && solver == o.solver && solver_params == o.solver_params &&
         seeds == o.seeds && budget == o.budget && n_init == o.n_init && output_dir == o.output_dir &&
         remote == o.remote && parallel == o.parallel && timing == o.timing;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");

    auto need_uint = [&]() -> std::uint64_t {
      auto u = as_uint(value);
      if (!u) fail(line_no, key + " expects a non-negative integer, got '" + value + "'");
      return *u;
    };
    auto need_double = [&]() -> double {
      auto d = as_double(value);
      if (!d) fail(line_no, key + " expects a number, got '" + value + "'");
      return *d;
    };

    auto& e = cfg.problem.ehrlich;
    if (key == "problem.family") {
      cfg.problem.family = value;
    } else if (key == "problem.alphabet_size") {
      e.alphabet_size = need_uint();
    } else if (key == "problem.sequence_length") {
      e.sequence_length = need_uint();
    } else if (key == "problem.n_motifs") {
      e.n_motifs = need_uint();
    } else if (key == "problem.motif_length") {
      e.motif_length = need_uint();
    } else if (key == "problem.quantization") {
      e.quantization = need_uint();
    } else if (key == "problem.sparsity") {
      e.sparsity = need_double();
    } else if (key == "problem.name") {
      e.name = value;
    } else if (key == "problem.seed") {
      cfg.problem.seed = need_uint();
    } else if (key == "solver.name") {
      cfg.solver = value;
    } else if (key.rfind("solver.", 0) == 0) {
      cfg.solver_params[key.substr(7)] = typed_value(value);
    } else if (key == "run.seeds") {
      cfg.seeds.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        const auto u = as_uint(trim(item));
        if (!u) fail(line_no, "run.seeds expects comma-separated integers");
        cfg.seeds.push_back(*u);
      }
      if (cfg.seeds.empty()) fail(line_no, "run.seeds is empty");
    } else if (key == "run.budget") {
      cfg.budget = need_uint();
    } else if (key == "run.n_init") {
      cfg.n_init = need_uint();
    } else if (key == "run.output_dir") {
      cfg.output_dir = value;
    } else if (key == "run.remote") {
      cfg.remote = value;
    } else if (key == "run.parallel") {
      cfg.parallel = need_uint();
    } else if (key == "run.timing") {
      if (value == "none") {
        cfg.timing = TimingMode::None;
      } else if (value == "wall") {
        cfg.timing = TimingMode::Wall;
      } else {
        fail(line_no, "run.timing must be 'none' or 'wall'");
      }
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto& e = cfg.problem.ehrlich;
  out << "problem.family = " << cfg.problem.family << '\n'
      << "problem.alphabet_size = " << e.alphabet_size << '\n'
      << "problem.sequence_length = " << e.sequence_length << '\n'
      << "problem.n_motifs = " << e.n_motifs << '\n'
      << "problem.motif_length = " << e.motif_length << '\n'
      << "problem.quantization = " << e.quantization << '\n'
      << "problem.sparsity = " << nlohmann::json(e.sparsity).dump() << '\n';
  if (!e.name.empty()) out << "problem.name = " << e.name << '\n';
  if (cfg.problem.seed) out << "problem.seed = " << *cfg.problem.seed << '\n';
  out << "solver.name = " << cfg.solver << '\n';
  for (const auto& [k, v] : cfg.solver_params.items()) out << "solver." << k << " = " << render_value(v) << '\n';
  out << "run.seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) out << (i ? ", " : "") << cfg.seeds[i];
  out << '\n' << "run.budget = " << cfg.budget << '\n' << "run.n_init = " << cfg.n_init << '\n';
  if (!cfg.output_dir.empty()) out << "run.output_dir = " << cfg.output_dir << '\n';
  if (cfg.remote) out << "run.remote = " << *cfg.remote << '\n';
  out << "run.parallel = " << cfg.parallel << '\n'
      << "run.timing = " << (cfg.timing == TimingMode::Wall ? "wall" : "none") << '\n';
  return out.str();
}

nlohmann::json problem_config_to_json(const ProblemConfig& config) {
  const auto& e = config.ehrlich;
  nlohmann::json doc{{"family", config.family},
                     {"alphabet_size", e.alphabet_size},
                     {"sequence_length", e.sequence_length},
                     {"n_motifs", e.n_motifs},
                     {"motif_length", e.motif_length},
                     {"quantization", e.quantization},
                     {"sparsity", e.sparsity},
                     {"name", e.name}};
  doc["seed"] = config.seed ? nlohmann::json(*config.seed) : nlohmann::json();
  return doc;
}

void validate_config(const ExperimentConfig& config) {
  const auto family = resolve_family(config.problem);
  // Generation checks the remaining parameters.
  (void)ehrlich::EhrlichOracle::generate(family, config.problem.seed.value_or(0));
  (void)solvers::make_solver(config.solver, config.solver_params);
  if (config.seeds.empty()) throw Error(ErrorCode::ConfigError, "no seeds");
  if (config.budget == 0) throw Error(ErrorCode::ConfigError, "run.budget must be >= 1");
}

std::filesystem::path output_root(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("SEQBENCH_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

}  // namespace seqbench::harness
