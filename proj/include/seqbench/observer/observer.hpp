#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/black_box.hpp"

namespace seqbench::observer {

/// Everything needed to rebuild a run: the problem document and config,
/// the solver with its effective hyperparameters, seed, budget and init size.
struct RunMetadata {
  nlohmann::json problem;
  nlohmann::json problem_config;
  std::string solver;
  nlohmann::json solver_hyperparameters;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t n_init = 0;
  std::string artifact_version;
  std::string start_time;

  bool operator==(const RunMetadata&) const = default;
};

nlohmann::json to_json(const RunMetadata& metadata);
/// Throws IoError on missing or mistyped fields.
RunMetadata run_metadata_from_json(const nlohmann::json& doc);

/// Written once at the end of a run. Aggregation reads only these.
struct RunSummary {
  std::string solver;
  std::string task;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::string error;
  double best_score = 0.0;
  std::vector<double> trajectory;
  std::size_t total_calls = 0;
  std::size_t init_calls = 0;
  double duration_s = 0.0;
  std::string end_time;

  bool operator==(const RunSummary&) const = default;
};

nlohmann::json to_json(const RunSummary& summary);
RunSummary run_summary_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ObservationEvent& event);
/// Unknown fields are ignored. Throws IoError on missing or mistyped fields.
ObservationEvent observation_event_from_json(const nlohmann::json& doc);

/// UTC, second resolution, e.g. "2024-05-01T12:00:00Z".
std::string utc_timestamp();

inline constexpr const char* kMetadataFile = "metadata.json";
inline constexpr const char* kEventsFile = "events.jsonl";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kRemoteLogFile = "remote_log.jsonl";

/// Run directory observer: metadata.json, events.jsonl (one event per line,
/// flushed per event), summary.json, plus remote_log.jsonl for forwarded
/// log messages.
class FileObserver final : public Observer {
 public:
  FileObserver(const FileObserver&) = delete;
  FileObserver& operator=(const FileObserver&) = delete;

  void observe(const ObservationEvent& event) override;
  void log(const nlohmann::json& message) override;

  /// Writes summary.json and closes the streams. Throws IoError when called twice.
  void finalize(const RunSummary& summary);

  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::size_t events_written() const noexcept { return events_written_; }
  bool finalized() const noexcept { return finalized_; }

 private:
  friend std::unique_ptr<FileObserver> initialize_observer(const RunMetadata&,
                                                           const std::filesystem::path&);
  explicit FileObserver(std::filesystem::path dir);

  std::filesystem::path dir_;
  std::ofstream events_;
  std::ofstream remote_log_;
  std::mutex mutex_;
  std::size_t events_written_ = 0;
  bool finalized_ = false;
};

/// Creates the directory if needed. Refuses a directory that already holds
/// a run (IoError) instead of overwriting it.
std::unique_ptr<FileObserver> initialize_observer(const RunMetadata& metadata,
                                                  const std::filesystem::path& dir);

RunMetadata read_metadata(const std::filesystem::path& dir);
RunSummary read_summary(const std::filesystem::path& dir);
std::vector<ObservationEvent> read_events(const std::filesystem::path& events_file);

/// Drops a trailing partial line left by a killed run. Returns the number of
/// complete lines kept.
std::size_t recover_event_stream(const std::filesystem::path& events_file);

/// Keeps events in memory; used by tests and the isolation server.
class RecordingObserver final : public Observer {
 public:
  void observe(const ObservationEvent& event) override { events.push_back(event); }
  void log(const nlohmann::json& message) override { messages.push_back(message); }

  std::vector<ObservationEvent> events;
  std::vector<nlohmann::json> messages;
};

}  // namespace seqbench::observer
