#include <doctest.h>

#include "seqbench/core/error.hpp"
#include "seqbench/core/rng.hpp"
#include "seqbench/embedding/one_hot.hpp"

using namespace seqbench;

TEST_CASE("one-hot encoding") {
  const auto v = one_hot_encode(Sequence{0, 2}, 3);
  REQUIRE(v.size() == 6);
  const std::vector<double> expected{1, 0, 0, 0, 0, 1};
  for (int i = 0; i < 6; ++i) CHECK(v[i] == expected[static_cast<std::size_t>(i)]);
  CHECK_THROWS_AS(one_hot_encode(Sequence{0, 3}, 3), Error);
}

TEST_CASE("decoding takes the per-block argmax, ties to the lowest index") {
  Eigen::VectorXd a(3);
  a << 0.2, 0.5, 0.3;
  CHECK(one_hot_decode(a, 1, 3) == Sequence{1});
  Eigen::VectorXd b(3);
  b << 0.5, 0.5, 0.0;
  CHECK(one_hot_decode(b, 1, 3) == Sequence{0});
  CHECK_THROWS_AS(one_hot_decode(b, 2, 3), Error);
}

TEST_CASE("round trip and block sums") {
  auto rng = make_rng(0, "onehot");
  for (int i = 0; i < 200; ++i) {
    std::vector<Token> t(25);
    for (auto& x : t) x = static_cast<Token>(uniform_index(rng, 20));
    const Sequence s(t);
    const auto v = one_hot_encode(s, 20);
    CHECK(v.sum() == 25.0);
    CHECK(one_hot_decode(v, 25, 20) == s);
  }
  Eigen::VectorXd wild(4);
  wild << -3, 2, 0.4, 7;
  const auto c = clip_unit(wild);
  CHECK(c.minCoeff() >= 0.0);
  CHECK(c.maxCoeff() <= 1.0);
}
