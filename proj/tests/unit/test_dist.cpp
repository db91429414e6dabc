#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wimwc/dist.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/selfcheck.hpp"

using namespace wimwc;

TEST_SUITE("dist") {

TEST_CASE("construction validates shape, sign and mass") {
  CHECK_THROWS_AS(JointDist({{"A", 2}}, {0.5}), InputError);
  CHECK_THROWS_AS(JointDist({{"A", 2}}, {1.5, -0.5}), InputError);
  CHECK_THROWS_AS(JointDist({{"A", 2}}, {0.5, 0.4}), InputError);
  CHECK_THROWS_AS(JointDist({{"A", 2}, {"A", 2}}, {0.25, 0.25, 0.25, 0.25}), InputError);
  CHECK_THROWS_AS(JointDist({{"A", 0}}, {}), InputError);
  CHECK_THROWS_AS(JointDist::uniform({{"A", 1 << 13}, {"B", 1 << 12}}), SizeError);

  const JointDist d({{"A", 2}}, {1.0 + 1e-13, -1e-13});
  CHECK(d.probs()[1] == 0.0);
}

TEST_CASE("entropy of simple laws") {
  CHECK(entropy(JointDist::uniform({{"A", 8}}), {"A"}) == doctest::Approx(3.0).epsilon(1e-12));
  const int at[] = {1, 0};
  CHECK(entropy(JointDist::point_mass({{"A", 3}, {"B", 2}}, at), {"A", "B"}) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(1.5), InputError);
}

TEST_CASE("two identical bits share one bit") {
  const JointDist d({{"A", 2}, {"B", 2}}, {0.5, 0.0, 0.0, 0.5});
  CHECK(cond_mutual_info(d, {"A"}, {"B"}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cond_entropy(d, {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("entropies and mutual information match the map oracle") {
  optim::Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto d = selfcheck::random_dist(rng, selfcheck::random_vars(rng, "V", 4, 1, 4));
    const NameSet a{"V1", "V3"}, b{"V2"}, c{"V4"};
    CHECK(entropy(d, a) == doctest::Approx(oracle::H(d, a)).epsilon(1e-9));
    CHECK(cond_entropy(d, a, b) == doctest::Approx(oracle::Hc(d, a, b)).epsilon(1e-9));
    CHECK(std::abs(cond_mutual_info(d, a, b, c) - oracle::I(d, a, b, c)) <= 1e-9);
  }
}

TEST_CASE("marginalize keeps variable order and mass") {
  optim::Rng rng(3);
  const auto d = selfcheck::random_dist(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
  const auto m = marginalize(d, {"C", "A"});
  REQUIRE(m.vars().size() == 2);
  CHECK(m.vars()[0].name == "A");
  CHECK(m.vars()[1].name == "C");
  const auto ref = oracle::marginal(d, {"A", "C"});
  for (const auto& [key, p] : ref) CHECK(m.at(key) == doctest::Approx(p).epsilon(1e-12));
  CHECK_THROWS_AS(marginalize(d, {"Q"}), InputError);
}

TEST_CASE("push_through appends channel outputs") {
  const auto d = JointDist::uniform({{"A", 2}});
  const Channel flip({{"A", 2}}, {{"B", 2}}, {0.9, 0.1, 0.2, 0.8});
  const auto j = push_through(d, flip);
  CHECK(j.vars().size() == 2);
  const int o[] = {1, 0};
  CHECK(j.at(o) == doctest::Approx(0.1));
  const Channel clash({{"B", 2}}, {{"A", 2}}, {1, 0, 0, 1});
  CHECK_THROWS_AS(push_through(JointDist::uniform({{"A", 2}, {"B", 2}}), clash), InputError);
  const Channel wrong({{"A", 3}}, {{"B", 1}}, {1, 1, 1});
  CHECK_THROWS_AS(push_through(d, wrong), InputError);
}

TEST_CASE("channel rows must be stochastic") {
  CHECK_THROWS_AS(Channel({{"A", 2}}, {{"B", 2}}, {0.5, 0.5, 0.5, 0.6}), InputError);
  const auto id = Channel::deterministic({{"A", 3}}, {{"B", 3}}, [](std::span<const int> a) { return std::vector<int>{a[0]}; });
  CHECK(id.at(2, 2) == 1.0);
  CHECK(id.at(2, 1) == 0.0);
}

TEST_CASE("chain rule on random instances") {
  optim::Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto d = selfcheck::random_dist(rng, selfcheck::random_vars(rng, "V", 2 + t % 3, 1, 4));
    const NameSet a{"V1"};
    NameSet b;
    for (std::size_t i = 1; i < d.vars().size(); ++i) b.push_back(d.vars()[i].name);
    NameSet ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(std::abs(entropy(d, ab) - entropy(d, a) - cond_entropy(d, b, a)) <= 1e-9);
  }
}

TEST_CASE("data processing for ordinary mutual information") {
  optim::Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto d = selfcheck::random_dist(rng, selfcheck::random_vars(rng, "V", 2, 1, 4));
    const auto ch = selfcheck::random_channel(rng, {d.vars()[1]}, {{"C", 3}});
    const auto j = push_through(d, ch);
    CHECK(cond_mutual_info(j, {"V1"}, {"C"}) <= cond_mutual_info(j, {"V1"}, {"V2"}) + 1e-9);
  }
}

}
