#include <string>

#include "doctest.h"
#include "wimwc/errors.hpp"
#include "wimwc/io.hpp"
#include "wimwc/presets.hpp"

using namespace wimwc;

namespace {

std::string message_of(const std::string& text) {
  try {
    (void)io::parse_dist(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("distribution files round-trip") {
  const std::string text = R"({"vars": [{"name": "A", "card": 2}, {"name": "B", "card": 3}],
                               "probs": [[0.1, 0.2, 0.1], [0.3, 0.2, 0.1]]})";
  const auto d = io::parse_dist(text);
  const int at[] = {1, 0};
  CHECK(d.at(at) == doctest::Approx(0.3));
  const auto back = io::parse_dist(io::dist_json(d));
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.probs()[i] == doctest::Approx(d.probs()[i]).epsilon(1e-15));
  CHECK(back.vars() == d.vars());
}

TEST_CASE("normalization within 1e-6 and rejection beyond") {
  const auto d = io::parse_dist(R"({"vars": [{"name": "A", "card": 2}], "probs": [0.5, 0.5000005]})");
  CHECK(d.probs()[0] + d.probs()[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(message_of(R"({"vars": [{"name": "A", "card": 2}], "probs": [0.5, 0.51]})").find("probs") != std::string::npos);
  CHECK_THROWS_AS(io::parse_channel(R"({"in_vars": [{"name": "A", "card": 2}], "out_vars": [{"name": "B", "card": 2}],
                                        "probs": [[1, 0], [0.5, 0.4]]})"),
                  InputError);
}

TEST_CASE("diagnostics name the line or field") {
  CHECK(message_of("{\n  \"vars\": [\n  oops ]}").find("line 3") != std::string::npos);
  CHECK(message_of(R"({"vars": [{"name": "A"}], "probs": [1]})").find("vars[0].card") != std::string::npos);
  CHECK(message_of(R"({"vars": [{"name": "A", "card": 2}], "probs": [1, 0, 0]})").find("expected length 2") !=
        std::string::npos);
  CHECK(message_of(R"({"vars": [{"name": "A", "card": 2}], "probs": [1.5, -0.5]})").find("negative") != std::string::npos);
  CHECK(message_of(R"({"vars": [{"name": "A", "card": 2}]})").find("'probs'") != std::string::npos);
}

TEST_CASE("lambda files and presets") {
  const auto fp = io::parse_lambda(R"({"k": 2, "weights": [{"subset": [1], "w": 1}, {"subset": [2], "w": 1}]})");
  CHECK(fp.weight(1) == 1.0);
  CHECK(io::lambda_from_arg("uniform-km1", 3).weight(0b011) == doctest::Approx(0.5));
  CHECK(io::lambda_from_arg("partition:1,2|3", 3).weight(0b100) == doctest::Approx(1.0));
  CHECK_THROWS_AS(io::parse_lambda(R"({"k": 2, "weights": [{"subset": [1], "w": 1}]})"), InputError);
  CHECK_THROWS_AS(io::parse_lambda(R"({"k": 2, "weights": [{"subset": [1, 2], "w": 1}]})"), InputError);
  CHECK_THROWS_AS(io::parse_lambda(R"({"k": 2, "weights": [{"subset": [3], "w": 1}]})"), InputError);
  const auto rt = io::parse_lambda(io::lambda_json(io::lambda_from_arg("uniform-km1", 4)));
  CHECK(rt.table() == io::lambda_from_arg("uniform-km1", 4).table());
}

TEST_CASE("system and MAC files") {
  const auto sys = io::parse_system(presets::by_name("bsc-system"));
  CHECK(sys.k == 2);
  CHECK(sys.parallels.size() == 1);
  for (std::size_t i = 0; i < sys.main.probs().size(); ++i)
    CHECK(sys.main.probs()[i] == doctest::Approx(presets::bsc_channel().probs()[i]).epsilon(1e-15));
  const auto mac = io::parse_mac(presets::by_name("adder-mac"));
  CHECK(mac.card_x1() == 2);
  CHECK_THROWS_AS(io::parse_mac(presets::by_name("bsc-channel")), InputError);
  CHECK_THROWS_AS(io::parse_system(R"({"k": 2, "r": 2, "main": {"in_vars": [], "out_vars": [], "probs": 1}})"), InputError);
}

TEST_CASE("code files") {
  const std::string text = R"({"k": 2, "n": 1, "w_cards": [2, 1], "schedule": [0],
    "encoders": [[[0, 1]], [[0]]],
    "channels": [{"in_vars": [{"name": "X1", "card": 2}, {"name": "X2", "card": 2}],
                  "out_vars": [{"name": "Y1", "card": 1}, {"name": "Y2", "card": 2}, {"name": "Z", "card": 1}],
                  "probs": [[[[[1], [0]]], [[[1], [0]]]], [[[[0], [1]]], [[[0], [1]]]]]}]})";
  const auto spec = io::parse_code(text);
  CHECK(spec.code.w_dists[0] == std::vector<double>{0.5, 0.5});
  CHECK_FALSE(spec.aux.has_value());
  const auto again = io::parse_code(io::code_json(spec));
  CHECK(again.code.encoders == spec.code.encoders);
  CHECK_THROWS_AS(io::parse_code(R"({"k": 2, "n": 1, "schedule": [0], "encoders": [], "channels": []})"), InputError);
}

}
