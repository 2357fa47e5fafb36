#include <doctest.h>

#include <memory>

#include "seqbench/core/black_box.hpp"
#include "seqbench/core/error.hpp"
#include "seqbench/core/problem.hpp"
#include "seqbench/ehrlich/ehrlich.hpp"
#include "seqbench/observer/observer.hpp"

using namespace seqbench;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

std::shared_ptr<const ehrlich::EhrlichOracle> pest_oracle(std::uint64_t seed) {
  ProblemConfig pc;
  pc.family = "pest_control_equiv";
  return std::make_shared<const ehrlich::EhrlichOracle>(ehrlich::EhrlichOracle::generate(resolve_family(pc), seed));
}

}  // namespace

TEST_CASE("sequence validation") {
  ProblemInfo info;
  info.alphabet = Alphabet::letters(5);
  info.sequence_length = 25;
  Sequence ok(std::vector<Token>(25, 4));
  CHECK_NOTHROW(validate_sequence(ok, info));
  Sequence bad_token = ok;
  bad_token[7] = 5;
  CHECK(code_of([&] { validate_sequence(bad_token, info); }) == ErrorCode::UnknownToken);
  Sequence short_seq(std::vector<Token>(24, 0));
  CHECK(code_of([&] { validate_sequence(short_seq, info); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("alphabet and rendering") {
  const auto aa = Alphabet::amino_acids();
  CHECK(aa.size() == 20);
  CHECK(aa.token(0) == "A");
  CHECK(aa.index_of("Y") == 19);
  const Sequence s{0, 1, 2, 19};
  CHECK(render(s, aa) == "ACDY");
  CHECK(parse_sequence("ACDY", aa) == s);
  CHECK(code_of([&] { (void)aa.index_of("B"); }) == ErrorCode::UnknownToken);
  CHECK(Alphabet::letters(30).token(29) == "T29");
}

TEST_CASE("derived streams are stable and distinct") {
  CHECK(derive_seed(1, "init") == derive_seed(1, "init"));
  CHECK(derive_seed(1, "init") != derive_seed(1, "solver"));
  CHECK(derive_seed(1, "init") != derive_seed(2, "init"));
  auto rng = make_rng(3, "u");
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(uniform_index(rng, 7) < 7);
  }
}

TEST_CASE("budget accounting") {
  const auto oracle = pest_oracle(0);
  BlackBoxHandle handle(std::make_shared<LocalBackend>(oracle), 300);
  CHECK(remaining_budget(handle) == 300);
  auto rng = make_rng(0, "t");
  for (int i = 0; i < 10; ++i) handle.evaluate(ehrlich::sample_chain(oracle->matrix(), 25, rng));
  CHECK(remaining_budget(handle) == 290);
  for (int i = 0; i < 290; ++i) {
    const double s = handle.evaluate(ehrlich::sample_chain(oracle->matrix(), 25, rng));
    CHECK((s >= 0.0 && s <= 1.0));
  }
  CHECK(remaining_budget(handle) == 0);
  CHECK(handle.ledger().consumed() == 300);
  const auto extra = oracle->construct_optimum();
  CHECK(code_of([&] { handle.evaluate(extra); }) == ErrorCode::BudgetExhausted);
  CHECK(handle.ledger().consumed() == 300);
}

TEST_CASE("a batch that does not fit is rejected whole") {
  const auto oracle = pest_oracle(1);
  BlackBoxHandle handle(std::make_shared<LocalBackend>(oracle), 1);
  const auto opt = oracle->construct_optimum();
  const std::vector<Sequence> batch{opt, opt};
  CHECK(code_of([&] { handle.evaluate(batch); }) == ErrorCode::BudgetExhausted);
  CHECK(handle.ledger().consumed() == 0);
  CHECK(handle.evaluate(opt) == 1.0);
}

TEST_CASE("invalid sequences are not charged") {
  const auto oracle = pest_oracle(2);
  BlackBoxHandle handle(std::make_shared<LocalBackend>(oracle), 5);
  Sequence bad(std::vector<Token>(25, 9));
  CHECK(code_of([&] { handle.evaluate(bad); }) == ErrorCode::UnknownToken);
  CHECK(handle.ledger().consumed() == 0);
}

namespace {

struct FailingObserver final : Observer {
  int calls = 0;
  void observe(const ObservationEvent&) override {
    if (++calls == 2) throw Error(ErrorCode::IoError, "disk full");
  }
};

}  // namespace

TEST_CASE("observer failure fails the call and keeps it off the ledger") {
  const auto oracle = pest_oracle(3);
  BlackBoxHandle handle(std::make_shared<LocalBackend>(oracle), 10);
  FailingObserver obs;
  handle.set_observer(&obs);
  const auto opt = oracle->construct_optimum();
  handle.evaluate(opt);
  CHECK(code_of([&] { handle.evaluate(opt); }) == ErrorCode::IoError);
  CHECK(handle.ledger().consumed() == 1);
}

TEST_CASE("events carry phase, index and running best") {
  const auto oracle = pest_oracle(4);
  BlackBoxHandle handle(std::make_shared<LocalBackend>(oracle), 20, "init");
  observer::RecordingObserver obs;
  handle.set_observer(&obs);
  auto rng = make_rng(4, "t");
  for (int i = 0; i < 20; ++i) handle.evaluate(ehrlich::sample_chain(oracle->matrix(), 25, rng));
  REQUIRE(obs.events.size() == 20);
  for (std::size_t i = 0; i < obs.events.size(); ++i) {
    CHECK(obs.events[i].call_index == i);
    CHECK(obs.events[i].phase == "init");
    CHECK(obs.events[i].wall_time_ms == 0);
    if (i > 0) CHECK(obs.events[i].best_so_far >= obs.events[i - 1].best_so_far);
  }
}

TEST_CASE("create_problem") {
  SUBCASE("ehrlich (7, 2) with ten initial points") {
    ProblemConfig pc;
    pc.ehrlich.sequence_length = 15;
    pc.ehrlich.n_motifs = 2;
    pc.ehrlich.motif_length = 7;
    ProblemOptions opt;
    opt.n_init = 10;
    auto p = create_problem(pc, 0, opt);
    CHECK(p.init_data.size() == 10);
    CHECK(p.black_box.info().sequence_length == 15);
    CHECK(p.black_box.remaining_budget() == 300);
    CHECK(p.init_black_box.ledger().consumed() == 10);
    for (const auto& [seq, score] : p.init_data) {
      CHECK(ehrlich::is_feasible(seq, p.oracle->matrix()));
      CHECK(score == p.oracle->score(seq));
    }
  }
  SUBCASE("pest control equivalent") {
    ProblemConfig pc;
    pc.family = "pest_control_equiv";
    auto p = create_problem(pc, 5);
    CHECK(p.oracle->info().alphabet.size() == 5);
    CHECK(p.oracle->info().sequence_length == 25);
    REQUIRE(p.oracle->motifs().size() == 1);
    CHECK(p.oracle->motifs()[0].length() == 25);
  }
  SUBCASE("same seed gives identical initial data") {
    ProblemConfig pc;
    auto a = create_problem(pc, 11);
    auto b = create_problem(pc, 11);
    CHECK(a.init_data == b.init_data);
    CHECK(a.oracle->to_json().dump() == b.oracle->to_json().dump());
  }
  SUBCASE("unknown family") {
    ProblemConfig pc;
    pc.family = "nope";
    CHECK(code_of([&] { (void)create_problem(pc, 0); }) == ErrorCode::UnknownProblem);
  }
  SUBCASE("infeasible configuration") {
    ProblemConfig pc;
    pc.ehrlich.sequence_length = 10;
    pc.ehrlich.n_motifs = 2;
    pc.ehrlich.motif_length = 7;
    CHECK(code_of([&] { (void)create_problem(pc, 0); }) == ErrorCode::InfeasibleConfig);
  }
}
