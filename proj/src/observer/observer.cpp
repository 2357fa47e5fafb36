#include "seqbench/observer/observer.hpp"

#include <ctime>
#include <sstream>

#include "seqbench/core/error.hpp"

namespace seqbench::observer {

namespace fs = std::filesystem;

namespace {

template <typename T>
T field(const nlohmann::json& doc, const char* key, const char* what) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::IoError, std::string(what) + ": missing or invalid field '" + key + "'");
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, "cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::trunc);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace

nlohmann::json to_json(const RunMetadata& m) {
  return {{"problem", m.problem},
          {"problem_config", m.problem_config},
          {"solver", m.solver},
          {"solver_hyperparameters", m.solver_hyperparameters},
          {"seed", m.seed},
          {"budget", m.budget},
          {"n_init", m.n_init},
          {"artifact_version", m.artifact_version},
          {"start_time", m.start_time}};
}

RunMetadata run_metadata_from_json(const nlohmann::json& doc) {
  constexpr const char* what = "run metadata";
  RunMetadata m;
  m.problem = field<nlohmann::json>(doc, "problem", what);
  m.problem_config = field<nlohmann::json>(doc, "problem_config", what);
  m.solver = field<std::string>(doc, "solver", what);
  m.solver_hyperparameters = field<nlohmann::json>(doc, "solver_hyperparameters", what);
  m.seed = field<std::uint64_t>(doc, "seed", what);
  m.budget = field<std::size_t>(doc, "budget", what);
  m.n_init = field<std::size_t>(doc, "n_init", what);
  m.artifact_version = field<std::string>(doc, "artifact_version", what);
  m.start_time = field<std::string>(doc, "start_time", what);
  return m;
}

nlohmann::json to_json(const RunSummary& s) {
  return {{"solver", s.solver},
          {"task", s.task},
          {"seed", s.seed},
          {"status", s.status},
          {"error", s.error},
          {"best_score", s.best_score},
          {"trajectory", s.trajectory},
          {"total_calls", s.total_calls},
          {"init_calls", s.init_calls},
          {"duration_s", s.duration_s},
          {"end_time", s.end_time}};
}

RunSummary run_summary_from_json(const nlohmann::json& doc) {
  constexpr const char* what = "run summary";
  RunSummary s;
  s.solver = field<std::string>(doc, "solver", what);
  s.task = field<std::string>(doc, "task", what);
  s.seed = field<std::uint64_t>(doc, "seed", what);
  s.status = field<std::string>(doc, "status", what);
  s.error = field<std::string>(doc, "error", what);
  s.best_score = field<double>(doc, "best_score", what);
  s.trajectory = field<std::vector<double>>(doc, "trajectory", what);
  s.total_calls = field<std::size_t>(doc, "total_calls", what);
  s.init_calls = field<std::size_t>(doc, "init_calls", what);
  s.duration_s = field<double>(doc, "duration_s", what);
  s.end_time = field<std::string>(doc, "end_time", what);
  return s;
}

nlohmann::json to_json(const ObservationEvent& e) {
  return {{"call_index", e.call_index}, {"sequence", e.sequence},        {"score", e.score},
          {"best_so_far", e.best_so_far}, {"wall_time_ms", e.wall_time_ms}, {"phase", e.phase}};
}

ObservationEvent observation_event_from_json(const nlohmann::json& doc) {
  constexpr const char* what = "observation event";
  ObservationEvent e;
  e.call_index = field<std::uint64_t>(doc, "call_index", what);
  e.sequence = field<std::string>(doc, "sequence", what);
  e.score = field<double>(doc, "score", what);
  e.best_so_far = field<double>(doc, "best_so_far", what);
  e.wall_time_ms = field<std::int64_t>(doc, "wall_time_ms", what);
  e.phase = field<std::string>(doc, "phase", what);
  return e;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

FileObserver::FileObserver(fs::path dir) : dir_(std::move(dir)) {}

std::unique_ptr<FileObserver> initialize_observer(const RunMetadata& metadata, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const char* name : {kMetadataFile, kEventsFile, kSummaryFile}) {
    if (fs::exists(dir / name)) {
      throw Error(ErrorCode::IoError, dir.string() + " already holds a run (" + name + " exists)");
    }
  }
  write_json_file(dir / kMetadataFile, to_json(metadata));

  std::unique_ptr<FileObserver> obs(new FileObserver(dir));
  obs->events_.open(dir / kEventsFile, std::ios::out | std::ios::app);
  if (!obs->events_) throw Error(ErrorCode::IoError, "cannot open " + (dir / kEventsFile).string());
  return obs;
}

void FileObserver::observe(const ObservationEvent& event) {
  std::lock_guard lock(mutex_);
  if (finalized_) throw Error(ErrorCode::IoError, "observer already finalized");
  events_ << to_json(event).dump() << '\n';
  events_.flush();
  if (!events_) throw Error(ErrorCode::IoError, "event write failed in " + dir_.string());
  ++events_written_;
}

void FileObserver::log(const nlohmann::json& message) {
  std::lock_guard lock(mutex_);
  if (finalized_) return;
  if (!remote_log_.is_open()) remote_log_.open(dir_ / kRemoteLogFile, std::ios::out | std::ios::app);
  remote_log_ << message.dump() << '\n';
  remote_log_.flush();
}

void FileObserver::finalize(const RunSummary& summary) {
  std::lock_guard lock(mutex_);
  if (finalized_) throw Error(ErrorCode::IoError, "observer already finalized");
  finalized_ = true;
  events_.close();
  if (remote_log_.is_open()) remote_log_.close();
  write_json_file(dir_ / kSummaryFile, to_json(summary));
}

RunMetadata read_metadata(const fs::path& dir) {
  return run_metadata_from_json(read_json_file(dir / kMetadataFile));
}

RunSummary read_summary(const fs::path& dir) {
  return run_summary_from_json(read_json_file(dir / kSummaryFile));
}

std::vector<ObservationEvent> read_events(const fs::path& events_file) {
  std::ifstream in(events_file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + events_file.string());
  std::vector<ObservationEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::IoError,
                  events_file.string() + ":" + std::to_string(line_no) + ": not a JSON record");
    }
    events.push_back(observation_event_from_json(doc));
  }
  return events;
}

std::size_t recover_event_stream(const fs::path& events_file) {
  std::ifstream in(events_file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + events_file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  in.close();
  const std::string data = buf.str();

  std::size_t keep = 0;
  std::size_t lines = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) break;
    if (!nlohmann::json::accept(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                data.begin() + static_cast<std::ptrdiff_t>(nl))) {
      break;
    }
    keep = nl + 1;
    ++lines;
    pos = nl + 1;
  }
  if (keep != data.size()) {
    std::error_code ec;
    fs::resize_file(events_file, keep, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot truncate " + events_file.string() + ": " + ec.message());
  }
  return lines;
}

}  // namespace seqbench::observer
