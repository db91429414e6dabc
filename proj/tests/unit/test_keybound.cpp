#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/io.hpp"
#include "wimwc/keybound.hpp"
#include "wimwc/presets.hpp"
#include "wimwc/selfcheck.hpp"

using namespace wimwc;
using namespace wimwc::keybound;

namespace {

fracpart::FractionalPartition pair_fp() {
  fracpart::FractionalPartition fp(2);
  fp.set(1, 1.0);
  fp.set(2, 1.0);
  return fp;
}

Channel uv_law(optim::Rng& rng, const Channel& ch, int cu, int cv) {
  std::vector<VarSpec> in = ch.in_vars();
  for (int i = 0; i < 2; ++i) in.push_back(ch.out_vars()[static_cast<std::size_t>(i)]);
  return selfcheck::random_channel(rng, in, {{"U", cu}, {"V", cv}});
}

// Objective recomputed from oracle entropies on the composed joint.
double oracle_objective(const JointDist& px, const Channel& ch_t, const Channel& puv) {
  const auto j = push_through(push_through(px, ch_t), puv);
  return oracle::I(j, {"X1", "Y1"}, {"X2", "Y2"}, {"T"}) - oracle::I(j, {"X1"}, {"X2"}) +
         oracle::I(j, {"V"}, {"T"}, {"U"}) - oracle::I(j, {"V"}, {"Z"}, {"U"});
}

OptimizerConfig quick() {
  OptimizerConfig c;
  c.restarts = 2;
  c.max_iters = 100;
  return c;
}

}  // namespace

TEST_SUITE("keybound") {

TEST_CASE("t_equals_z copies Z") {
  const auto ch = presets::bsc_channel();
  const auto t = t_equals_z(ch);
  const auto j = push_through(push_through(JointDist::uniform(ch.in_vars()), ch), t);
  CHECK(std::abs(cond_entropy(j, {"T"}, {"Z"})) <= 1e-12);
  CHECK_THROWS_AS(t_equals_z(Channel::deterministic({{"A", 2}}, {{"B", 2}}, [](std::span<const int> a) {
                    return std::vector<int>{a[0]};
                  })),
                  InputError);
}

TEST_CASE("objective matches the oracle and the flat evaluator") {
  optim::Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto ch = selfcheck::random_channel(rng, {{"X1", 2}, {"X2", 2}}, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}});
    std::vector<VarSpec> aux_in = ch.in_vars();
    aux_in.insert(aux_in.end(), ch.out_vars().begin(), ch.out_vars().end());
    const auto aux = selfcheck::random_channel(rng, aux_in, {{"T", 2}});
    const auto ch_t = compose_aux(ch, aux);
    const auto px = selfcheck::random_dist(rng, ch.in_vars());
    const auto puv = uv_law(rng, ch, 2, 3);
    const double v = v_objective(px, ch_t, puv, pair_fp(), 2);
    CHECK(std::abs(v - oracle_objective(px, ch_t, puv)) <= 1e-9);
    const VObjective flat(ch_t, pair_fp(), 2, 3);
    CHECK(std::abs(flat.value(px.probs(), puv.probs()) - v) <= 1e-9);
  }
}

TEST_CASE("degenerate objectives") {
  const auto cst = presets::constant_channel(2);
  const auto ch_t = compose_aux(cst, t_equals_z(cst));
  optim::Rng rng(4);
  const auto px = selfcheck::random_dist(rng, cst.in_vars());
  const auto puv = uv_law(rng, cst, 2, 2);
  CHECK(std::abs(v_objective(px, ch_t, puv, pair_fp(), 2)) <= 1e-12);

  // With T = Z the auxiliary terms cancel for every argument.
  const auto ch = presets::bsc_channel();
  const auto bt = compose_aux(ch, t_equals_z(ch));
  const auto j = push_through(push_through(px, bt), uv_law(rng, ch, 2, 2));
  const double expect = cond_mutual_info(j, {"X1", "Y1"}, {"X2", "Y2"}, {"T"}) - cond_mutual_info(j, {"X1"}, {"X2"});
  CHECK(std::abs(v_objective(px, bt, uv_law(rng, ch, 2, 2), pair_fp(), 2) - expect) <= 1e-9);
}

TEST_CASE("independent inputs with T = Z give a nonnegative objective") {
  optim::Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto ch = selfcheck::random_channel(rng, {{"X1", 2}, {"X2", 2}}, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}});
    const auto ch_t = compose_aux(ch, t_equals_z(ch));
    const auto p1 = selfcheck::random_dist(rng, {{"X1", 2}});
    const auto p2 = selfcheck::random_dist(rng, {{"X2", 2}});
    std::vector<double> p;
    for (double a : p1.probs())
      for (double b : p2.probs()) p.push_back(a * b);
    const Channel cuv = Channel::deterministic({{"X1", 2}, {"X2", 2}, {"Y1", 2}, {"Y2", 2}}, {{"U", 1}, {"V", 1}},
                                               [](std::span<const int>) { return std::vector<int>{0, 0}; });
    CHECK(v_objective(JointDist(ch.in_vars(), p), ch_t, cuv, pair_fp(), 2) >= -1e-9);
  }
}

TEST_CASE("gradient matches finite differences") {
  optim::Rng rng(13);
  const auto ch = presets::bsc_channel();
  const auto ch_t = compose_aux(ch, t_equals_z(ch));
  const VObjective obj(ch_t, pair_fp(), 3, 3);
  for (int t = 0; t < 5; ++t) {
    auto px = rng.simplex_point(obj.x_size());
    for (auto& v : px) v = 0.5 * v + 0.5 / static_cast<double>(px.size());
    std::vector<double> aux;
    for (std::size_t r = 0; r < obj.x_size() * obj.y_size(); ++r) {
      auto row = rng.simplex_point(obj.uv_size());
      for (auto& v : row) v = 0.5 * v + 0.5 / static_cast<double>(row.size());
      aux.insert(aux.end(), row.begin(), row.end());
    }
    std::vector<double> gp, ga;
    obj.value_and_gradient(px, aux, &gp, &ga);
    const double h = 1e-5;
    for (std::size_t i = 0; i < px.size(); ++i) {
      auto a = px, b = px;
      a[i] += h;
      b[i] -= h;
      const double fd = (obj.value(a, aux) - obj.value(b, aux)) / (2 * h);
      CHECK(std::abs(fd - gp[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
    for (std::size_t i = 0; i < aux.size(); i += 7) {
      auto a = aux, b = aux;
      a[i] += h;
      b[i] -= h;
      const double fd = (obj.value(px, a) - obj.value(px, b)) / (2 * h);
      CHECK(std::abs(fd - ga[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("inadmissible or mismatched partitions are rejected") {
  const auto ch = presets::bsc_channel();
  const auto ch_t = compose_aux(ch, t_equals_z(ch));
  const auto px = JointDist::uniform(ch.in_vars());
  optim::Rng rng(2);
  const auto puv = uv_law(rng, ch, 2, 2);
  fracpart::FractionalPartition fp3 = fracpart::preset_uniform_km1(3);
  CHECK_THROWS_AS(v_objective(px, ch_t, puv, fp3, 2), InputError);
  // For k = 2 every valid weighting has a singleton; with r = 1 the set {1} contains the key set.
  CHECK_THROWS_AS(v_objective(px, ch_t, puv, pair_fp(), 1), InputError);
}

TEST_CASE("public channel contribution vanishes with T = Z") {
  const auto rep = theorem1_bound(presets::public_system(), AuxReceiver::copy_z(), pair_fp(), quick());
  CHECK(std::abs(rep.value) <= 1e-6);
  CHECK_FALSE(rep.certified);
}

TEST_CASE("source model bound is finite for any parallel rate") {
  const auto a = theorem1_bound(presets::source_model_system(1.0), AuxReceiver::copy_z(), pair_fp(), quick());
  const auto b = theorem1_bound(presets::source_model_system(1e6), AuxReceiver::copy_z(), pair_fp(), quick());
  REQUIRE(a.per_channel.size() == 2);
  CHECK(std::abs(a.per_channel[1].v.value) <= 1e-6);
  CHECK(std::abs(b.value - a.value) <= 1e-6 * 1e6 + 1e-9);
  CHECK(std::abs(a.per_channel[0].v.value - a.value) <= 1e-6);
}

TEST_CASE("all-constant system has bound zero") {
  WiMWCSystem sys{2, 2, presets::constant_channel(2), {{presets::constant_channel(2), 3.0}}};
  const auto rep = theorem1_bound(sys, AuxReceiver::copy_z(), pair_fp(), quick());
  CHECK(std::abs(rep.value) <= 1e-12);
}

TEST_CASE("zero-rate parallel channels and seeds") {
  auto sys = presets::bsc_system(0.5);
  const auto base = theorem1_bound(sys, AuxReceiver::copy_z(), pair_fp(), quick());
  auto sys0 = sys;
  sys0.parallels.push_back({presets::bsc_channel(0.3, 0.1), 0.0});
  const auto with0 = theorem1_bound(sys0, AuxReceiver::copy_z(), pair_fp(), quick());
  CHECK(with0.value == base.value);
  const auto again = theorem1_bound(sys, AuxReceiver::copy_z(), pair_fp(), quick());
  CHECK(io::bound_report_json(again) == io::bound_report_json(base));
  double sum = 0.0;
  for (const auto& c : base.per_channel) sum += c.alpha * c.v.value;
  CHECK(std::abs(sum - base.value) <= 1e-12);
}

TEST_CASE("grid refinement is monotone") {
  // One silent terminal keeps the input simplex one-dimensional.
  const Channel ch({{"X1", 2}, {"X2", 1}}, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}},
                   {0.45, 0.05, 0.05, 0.45, 0.0, 0.0, 0.0, 0.0,
                    0.0, 0.0, 0.0, 0.0, 0.05, 0.45, 0.45, 0.05});
  auto cfg = quick();
  double prev = -1.0;
  for (int res : {5, 9, 17}) {
    cfg.grid_res = res;
    const auto r = v_lambda(ch, t_equals_z(ch), pair_fp(), 2, cfg);
    CHECK(r.value >= prev - 1e-12);
    prev = r.value;
  }
}

TEST_CASE("config validation") {
  OptimizerConfig c;
  c.restarts = 0;
  CHECK_THROWS_AS(check_config(c), InputError);
  c = {};
  c.grid_res = 1;
  CHECK_THROWS_AS(check_config(c), InputError);
  WiMWCSystem sys{2, 3, presets::bsc_channel(), {}};
  CHECK_THROWS_AS(check_system(sys), InputError);
  sys.r = 2;
  sys.parallels.push_back({presets::bsc_channel(), -1.0});
  CHECK_THROWS_AS(check_system(sys), InputError);
}

}
