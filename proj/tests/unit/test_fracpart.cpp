#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/fracpart.hpp"
#include "wimwc/optim.hpp"

using namespace wimwc;
using namespace wimwc::fracpart;

TEST_SUITE("fracpart") {

TEST_CASE("validation messages") {
  FractionalPartition fp(3);
  CHECK_FALSE(validate(fp).ok);
  fp.set(0b011, 1.0);
  fp.set(0b100, 1.0);
  CHECK(validate(fp).ok);
  fp.set(0b100, -0.5);
  CHECK_FALSE(validate(fp).ok);
  FractionalPartition full(2);
  full.set(0b11, 1.0);
  CHECK_FALSE(validate(full).ok);
  CHECK_THROWS_AS(require_valid(full), InputError);
}

TEST_CASE("presets are valid") {
  for (int k = 2; k <= 8; ++k) CHECK(validate(preset_uniform_km1(k)).ok);
  const auto pi = parse_partition(4, "1,2|3|4");
  CHECK(pi.r() == 3);
  const auto fp = preset_partition(pi);
  CHECK(validate(fp).ok);
  CHECK(fp.weight(0b1100) == doctest::Approx(0.5));
  CHECK(fp.weight(0b1011) == doctest::Approx(0.5));
  CHECK(fp.weight(0b0111) == doctest::Approx(0.5));
  CHECK(format_partition(pi) == "1,2|3|4");
}

TEST_CASE("partition parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_partition(3, "1,2"), InputError);
  CHECK_THROWS_AS(parse_partition(3, "1,2|2,3"), InputError);
  CHECK_THROWS_AS(parse_partition(3, "1,4|2,3"), InputError);
  CHECK_THROWS_AS(parse_partition(3, "1,,2|3"), InputError);
  CHECK_THROWS_AS(preset_partition(parse_partition(3, "1,2,3")), InputError);
}

TEST_CASE("vertex sets agree with the Gauss-Jordan oracle") {
  for (int k = 2; k <= 4; ++k) {
    const auto mine = vertices(k);
    auto ref = oracle::polytope_vertices(k);
    // Deduplicate the oracle list.
    std::vector<std::vector<double>> uniq;
    for (auto& v : ref) {
      bool seen = false;
      for (const auto& u : uniq) {
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
        seen = seen || d < 1e-9;
      }
      if (!seen) uniq.push_back(v);
    }
    CHECK(mine.size() == uniq.size());
    for (const auto& fp : mine) CHECK(validate(fp).ok);
  }
}

TEST_CASE("linear optimization matches brute force over oracle vertices") {
  optim::Rng rng(21);
  for (int k = 2; k <= 5; ++k) {
    const auto verts = oracle::polytope_vertices(k);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> c(std::size_t{1} << k);
      for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
      double lo = 1e300, hi = -1e300;
      for (const auto& x : verts) {
        double s = 0.0;
        for (std::size_t b = 1; b + 1 < c.size(); ++b) s += c[b] * x[b];
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      const auto mn = optimize_linear(k, c, Sense::kMin);
      const auto mx = optimize_linear(k, c, Sense::kMax);
      CHECK(std::abs(mn.value - lo) <= 1e-9);
      CHECK(std::abs(mx.value - hi) <= 1e-9);
      CHECK(validate(mn.lambda).ok);
      CHECK(std::abs(optimize_linear_simplex(k, c, Sense::kMin).value - lo) <= 1e-9);
      CHECK(std::abs(optimize_linear_simplex(k, c, Sense::kMax).value - hi) <= 1e-9);
    }
  }
}

TEST_CASE("simplex handles k above the vertex range") {
  optim::Rng rng(4);
  for (int k = 6; k <= 8; ++k) {
    std::vector<double> c(std::size_t{1} << k);
    for (auto& v : c) v = rng.uniform();
    const auto r = optimize_linear(k, c, Sense::kMin);
    CHECK(validate(r.lambda).ok);
    // Any partition preset is feasible, so the minimum cannot exceed its value.
    const auto fp = preset_uniform_km1(k);
    double s = 0.0;
    for (const auto& [b, w] : fp.support()) s += c[b] * w;
    CHECK(r.value <= s + 1e-9);
  }
}

TEST_CASE("admissibility for a key set") {
  CHECK(admissible_for_keyset(preset_uniform_km1(3), 3));
  CHECK_FALSE(admissible_for_keyset(preset_uniform_km1(3), 2));
  CHECK(admissible_for_keyset(preset_partition(parse_partition(3, "1|2|3")), 2) == false);
  CHECK(admissible_for_keyset(preset_partition(parse_partition(3, "1,3|2")), 2));
}

}
