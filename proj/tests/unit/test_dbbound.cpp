#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wimwc/dbbound.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/lambda_mi.hpp"
#include "wimwc/selfcheck.hpp"

using namespace wimwc;
using namespace wimwc::dbbound;

namespace {

std::vector<VarSpec> xs(int k) {
  std::vector<VarSpec> v;
  for (int i = 1; i <= k; ++i) v.push_back({"X" + std::to_string(i), 2});
  return v;
}

std::vector<VarSpec> yz(int k) {
  std::vector<VarSpec> v;
  for (int i = 1; i <= k; ++i) v.push_back({"Y" + std::to_string(i), 2});
  v.push_back({"Z", 2});
  return v;
}

// Y1 = X2, Y2 = X1, Z = 0.
Channel swap_channel() {
  return Channel::deterministic(xs(2), yz(2), [](std::span<const int> x) { return std::vector<int>{x[1], x[0], 0}; });
}

// Y1 = X2 + N, Y2 = X1 + N', Z = X1 + X2 + N'' with independent BSC noise.
Channel bsc(double p) {
  std::vector<double> probs;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y1 = 0; y1 < 2; ++y1)
        for (int y2 = 0; y2 < 2; ++y2)
          for (int z = 0; z < 2; ++z)
            probs.push_back(((y1 ^ x2) ? p : 1 - p) * ((y2 ^ x1) ? p : 1 - p) * ((z ^ x1 ^ x2) ? p : 1 - p));
  return Channel(xs(2), yz(2), probs);
}

void check_against_oracle(const TraceDist& trace, const InteractiveCode& code, const std::vector<Channel>& chans,
                          const Channel* aux) {
  const auto law = oracle::code_law(code, chans, aux);
  const auto full = trace.materialize();
  double mass = 0.0;
  for (const auto& [key, p] : law) {
    CHECK(full.at(key) == doctest::Approx(p).epsilon(1e-12));
    mass += full.at(key);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("dbbound") {

TEST_CASE("copy chain") {
  InteractiveCode code;
  code.k = 2;
  code.n = 1;
  code.w_dists = {{0.5, 0.5}, {1.0}};
  code.encoders = {{{0, 1}}, {{0}}};
  code.schedule = {0};
  const auto trace = simulate_code(code, {swap_channel()});
  const auto m = trace.marginal({"W1", "Y2_1"});
  CHECK(entropy(m, {"Y2_1"}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cond_entropy(m, {"Y2_1"}, {"W1"}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant encoders make everything independent of W") {
  InteractiveCode code;
  code.k = 2;
  code.n = 2;
  code.w_dists = {{0.3, 0.7}, {0.5, 0.25, 0.25}};
  code.schedule = {0, 0};
  code.encoders.resize(2);
  const std::vector<Channel> chans{bsc(0.2)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) code.encoders[static_cast<std::size_t>(i)].push_back(std::vector<int>(encoder_domain(code, chans, i, j), 1));
  const auto trace = simulate_code(code, chans);
  const auto full = trace.materialize();
  NameSet rest;
  for (const auto& n : trace.all_names())
    if (n[0] != 'W') rest.push_back(n);
  CHECK(std::abs(cond_mutual_info(full, {"W1", "W2"}, rest)) <= 1e-12);
  const auto s = lemma1_sides(trace, fracpart::preset_uniform_km1(2), Conditioning::kZ);
  CHECK(std::abs(s.w_dependence) <= 1e-12);
}

TEST_CASE("two-step feedback code matches the outcome-tree oracle") {
  InteractiveCode code;
  code.k = 2;
  code.n = 2;
  code.w_dists = {{0.5, 0.5}, {0.5, 0.5}};
  code.schedule = {0, 0};
  // X_11 = W1, X_12 = W1 xor Y_11; terminal 2 sends W2 then Y_21.
  code.encoders = {{{0, 1}, {0, 1, 1, 0}}, {{0, 1}, {0, 1, 0, 1}}};
  const std::vector<Channel> chans{bsc(0.1)};
  const auto trace = simulate_code(code, chans);
  check_against_oracle(trace, code, chans, nullptr);
  CHECK(memorylessness_gap(trace) <= 1e-9);
}

TEST_CASE("random codes with an auxiliary receiver match the oracle") {
  optim::Rng rng(99);
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 2;
    const int n = 1 + t % (k == 3 ? 2 : 3);
    const auto rc = selfcheck::random_code(rng, k, n, 2);
    const auto trace = simulate_code(rc.code, rc.channels, rc.aux);
    check_against_oracle(trace, rc.code, rc.channels, &rc.aux);
  }
}

TEST_CASE("dependence-balance sides against the entropy oracle") {
  optim::Rng rng(123);
  for (int t = 0; t < 10; ++t) {
    const auto rc = selfcheck::random_code(rng, 2, 2, 2);
    const auto trace = simulate_code(rc.code, rc.channels, rc.aux);
    const auto full = trace.materialize();
    fracpart::FractionalPartition fp(2);
    fp.set(1, 1.0);
    fp.set(2, 1.0);
    for (auto cond : {Conditioning::kZ, Conditioning::kT}) {
      const std::string c = cond == Conditioning::kZ ? "Z_" : "T_";
      const auto s = lemma1_sides(trace, fp, cond);
      // For k = 2 every term is an ordinary conditional mutual information.
      const double lhs = oracle::I(full, {"W1", "Y1_1", "Y1_2"}, {"W2", "Y2_1", "Y2_2"}, {c + "1", c + "2"}) -
                         oracle::I(full, {"W1"}, {"W2"});
      const double rhs = oracle::I(full, {"X1_1", "Y1_1"}, {"X2_1", "Y2_1"}, {c + "1"}) -
                         oracle::I(full, {"X1_1"}, {"X2_1"}) +
                         oracle::I(full, {"X1_2", "Y1_2"}, {"X2_2", "Y2_2"}, {c + "1", c + "2"}) -
                         oracle::I(full, {"X1_2"}, {"X2_2"}, {c + "1"});
      CHECK(std::abs(s.lhs - lhs) <= 1e-9);
      CHECK(std::abs(s.rhs - rhs) <= 1e-9);
      CHECK(s.lhs <= s.rhs + 1e-9);
    }
  }
}

TEST_CASE("inequality holds for every vertex weighting at k = 3") {
  optim::Rng rng(5);
  const auto verts = fracpart::vertices(3);
  for (int t = 0; t < 5; ++t) {
    const auto rc = selfcheck::random_code(rng, 3, 2, 2);
    const auto trace = simulate_code(rc.code, rc.channels, rc.aux);
    for (const auto& fp : verts)
      for (auto cond : {Conditioning::kZ, Conditioning::kT}) {
        const auto s = lemma1_sides(trace, fp, cond);
        CHECK(s.lhs <= s.rhs + 1e-9);
      }
  }
}

TEST_CASE("input errors") {
  InteractiveCode code;
  code.k = 2;
  code.n = 1;
  code.w_dists = {{1.0}, {1.0}};
  code.encoders = {{{0}}, {{0}}};
  code.schedule = {1};
  CHECK_THROWS_AS(simulate_code(code, {swap_channel()}), InputError);
  code.schedule = {0};
  code.encoders = {{{2}}, {{0}}};
  CHECK_THROWS_AS(simulate_code(code, {swap_channel()}), InputError);
  code.encoders = {{{0, 0}}, {{0}}};
  CHECK_THROWS_AS(simulate_code(code, {swap_channel()}), InputError);
  code.encoders = {{{0}}, {{0}}};
  const auto trace = simulate_code(code, {swap_channel()});
  CHECK_THROWS_AS(lemma1_sides(trace, fracpart::preset_uniform_km1(2), Conditioning::kT), InputError);
  CHECK_THROWS_AS(trace.marginal({"Q_1"}), InputError);
}

}
