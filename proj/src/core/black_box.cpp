#include "seqbench/core/black_box.hpp"

#include <algorithm>
#include <cmath>

#include "seqbench/core/error.hpp"

namespace seqbench {

nlohmann::json to_json(const ProblemInfo& info) {
  nlohmann::json j;
  j["name"] = info.name;
  j["alphabet"] = info.alphabet.tokens();
  j["sequence_length"] = info.sequence_length;
  j["deterministic"] = info.deterministic;
  j["known_optimum"] = info.known_optimum ? nlohmann::json(*info.known_optimum) : nlohmann::json();
  return j;
}

ProblemInfo problem_info_from_json(const nlohmann::json& j) {
  try {
    ProblemInfo info{j.at("name").get<std::string>(),
                     Alphabet(j.at("alphabet").get<std::vector<std::string>>()),
                     j.at("sequence_length").get<std::size_t>(), j.at("deterministic").get<bool>(),
                     std::nullopt};
    if (j.contains("known_optimum") && !j.at("known_optimum").is_null()) {
      info.known_optimum = j.at("known_optimum").get<double>();
    }
    return info;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("malformed problem info: ") + e.what());
  }
}

void validate_sequence(const Sequence& seq, const ProblemInfo& info) {
  if (seq.size() != info.sequence_length) {
    throw Error(ErrorCode::LengthMismatch, "expected length " + std::to_string(info.sequence_length) +
                                               ", got " + std::to_string(seq.size()));
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] >= info.alphabet.size()) {
      throw Error(ErrorCode::UnknownToken, "index " + std::to_string(seq[i]) + " at position " +
                                               std::to_string(i) + " outside alphabet of size " +
                                               std::to_string(info.alphabet.size()));
    }
  }
}

std::vector<double> LocalBackend::evaluate(std::span<const Sequence> batch) {
  std::vector<double> scores;
  scores.reserve(batch.size());
  for (const auto& seq : batch) scores.push_back(oracle_->score(seq));
  return scores;
}

void EvaluationLedger::append(Sequence seq, double score, double wall_time_s) {
  if (entries_.size() >= budget_) {
    throw Error(ErrorCode::BudgetExhausted, "ledger is full");
  }
  entries_.push_back({entries_.size(), std::move(seq), score, wall_time_s});
}

BlackBoxHandle::BlackBoxHandle(std::shared_ptr<EvaluationBackend> backend, std::size_t budget,
                               std::string phase)
    : backend_(std::move(backend)), info_(backend_->info()), ledger_(budget),
      phase_(std::move(phase)) {}

void BlackBoxHandle::set_observer(Observer* observer) {
  observer_ = observer;
  backend_->set_log_sink(observer);
}

void BlackBoxHandle::seed_best(double best) noexcept {
  best_ = best_ ? std::max(*best_, best) : best;
}

std::vector<double> BlackBoxHandle::evaluate(std::span<const Sequence> batch) {
  for (const auto& seq : batch) validate_sequence(seq, info_);
  if (batch.size() > ledger_.remaining()) {
    throw Error(ErrorCode::BudgetExhausted,
                "batch of " + std::to_string(batch.size()) + " exceeds remaining budget " +
                    std::to_string(ledger_.remaining()));
  }
  if (batch.empty()) return {};

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> scores = backend_->evaluate(batch);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  if (scores.size() != batch.size()) {
    throw Error(ErrorCode::ProtocolError, "backend returned " + std::to_string(scores.size()) +
                                              " scores for a batch of " +
                                              std::to_string(batch.size()));
  }
  const double per_call = elapsed.count() / static_cast<double>(batch.size());

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double best = best_ ? std::max(*best_, scores[i]) : scores[i];
    if (observer_ != nullptr) {
      ObservationEvent event;
      event.call_index = ledger_.consumed();
      event.sequence = render(batch[i], info_.alphabet);
      event.score = scores[i];
      event.best_so_far = best;
      event.wall_time_ms =
          timing_ == TimingMode::Wall ? static_cast<std::int64_t>(std::llround(per_call * 1e3)) : 0;
      event.phase = phase_;
      observer_->observe(event);
    }
    best_ = best;
    ledger_.append(batch[i], scores[i], per_call);
  }
  return scores;
}

double BlackBoxHandle::evaluate(const Sequence& seq) {
  return evaluate(std::span<const Sequence>(&seq, 1)).front();
}

}  // namespace seqbench
