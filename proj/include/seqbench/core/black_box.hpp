#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/sequence.hpp"

namespace seqbench {

struct ProblemInfo {
  std::string name;
  Alphabet alphabet = Alphabet::letters(2);
  std::size_t sequence_length = 0;
  bool deterministic = true;
  std::optional<double> known_optimum;

  bool operator==(const ProblemInfo&) const = default;
};

nlohmann::json to_json(const ProblemInfo& info);
ProblemInfo problem_info_from_json(const nlohmann::json& j);

/// Throws LengthMismatch or UnknownToken.
void validate_sequence(const Sequence& seq, const ProblemInfo& info);

/// Anything that maps sequences to scores. Implementations must be safe to
/// call on validated input only; the handle guarantees that.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual const ProblemInfo& info() const = 0;
  virtual double score(const Sequence& seq) const = 0;
};

/// One evaluation as reported to observers.
struct ObservationEvent {
  std::uint64_t call_index = 0;
  std::string sequence;
  double score = 0.0;
  double best_so_far = 0.0;
  std::int64_t wall_time_ms = 0;
  std::string phase = "solve";

  bool operator==(const ObservationEvent&) const = default;
};

class Observer {
 public:
  virtual ~Observer() = default;
  /// Must throw on failure; the evaluation is then not counted.
  virtual void observe(const ObservationEvent& event) = 0;
  /// Free-form messages (for example forwarded from a remote black box).
  virtual void log(const nlohmann::json& /*message*/) {}
};

/// Where the scores come from: an in-process oracle or a remote server.
class EvaluationBackend {
 public:
  virtual ~EvaluationBackend() = default;
  virtual ProblemInfo info() = 0;
  virtual std::vector<double> evaluate(std::span<const Sequence> batch) = 0;
  /// Receiver for log messages the backend produces while evaluating.
  virtual void set_log_sink(Observer* /*sink*/) {}
};

class LocalBackend final : public EvaluationBackend {
 public:
  explicit LocalBackend(std::shared_ptr<const Oracle> oracle) : oracle_(std::move(oracle)) {}
  ProblemInfo info() override { return oracle_->info(); }
  std::vector<double> evaluate(std::span<const Sequence> batch) override;

 private:
  std::shared_ptr<const Oracle> oracle_;
};

struct LedgerEntry {
  std::uint64_t call_index = 0;
  Sequence sequence;
  double score = 0.0;
  double wall_time_s = 0.0;
};

/// Append-only record of every counted evaluation against a fixed budget.
class EvaluationLedger {
 public:
  explicit EvaluationLedger(std::size_t budget) : budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }
  std::size_t consumed() const noexcept { return entries_.size(); }
  std::size_t remaining() const noexcept { return budget_ - entries_.size(); }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }

  void append(Sequence seq, double score, double wall_time_s);

 private:
  std::size_t budget_;
  std::vector<LedgerEntry> entries_;
};

enum class TimingMode { None, Wall };

/// Budgeted, observed evaluation endpoint. Confined to one thread at a time.
class BlackBoxHandle {
 public:
  BlackBoxHandle(std::shared_ptr<EvaluationBackend> backend, std::size_t budget,
                 std::string phase = "solve");

  const ProblemInfo& info() const noexcept { return info_; }
  const EvaluationLedger& ledger() const noexcept { return ledger_; }
  std::size_t remaining_budget() const noexcept { return ledger_.remaining(); }
  const std::string& phase() const noexcept { return phase_; }

  /// Observer is not owned; it must outlive the handle's use.
  void set_observer(Observer* observer);
  Observer* observer() const noexcept { return observer_; }
  void set_timing(TimingMode mode) noexcept { timing_ = mode; }
  /// Starting value for the best_so_far carried by observer events.
  void seed_best(double best) noexcept;
  std::optional<double> best() const noexcept { return best_; }

  /// Validates the whole batch, checks the budget, evaluates, then records
  /// each result. Throws BudgetExhausted without side effects when the batch
  /// does not fit.
  std::vector<double> evaluate(std::span<const Sequence> batch);
  double evaluate(const Sequence& seq);

 private:
  std::shared_ptr<EvaluationBackend> backend_;
  ProblemInfo info_;
  EvaluationLedger ledger_;
  std::string phase_;
  Observer* observer_ = nullptr;
  TimingMode timing_ = TimingMode::None;
  std::optional<double> best_;
};

inline std::size_t remaining_budget(const BlackBoxHandle& handle) {
  return handle.remaining_budget();
}

}  // namespace seqbench
