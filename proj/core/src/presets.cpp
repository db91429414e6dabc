#include "wimwc/presets.hpp"

#include "wimwc/errors.hpp"
#include "wimwc/io.hpp"

namespace wimwc::presets {

namespace {

std::vector<VarSpec> inputs(int k, int card) {
  std::vector<VarSpec> v;
  for (int i = 1; i <= k; ++i) v.push_back({"X" + std::to_string(i), card});
  return v;
}

std::vector<VarSpec> outputs(int k, int card_y, int card_z) {
  std::vector<VarSpec> v;
  for (int i = 1; i <= k; ++i) v.push_back({"Y" + std::to_string(i), card_y});
  v.push_back({"Z", card_z});
  return v;
}

double bern(int bit, double p) { return bit ? p : 1.0 - p; }

}  // namespace

Channel public_noiseless_channel(int k) {
  if (k < 2 || k > 6) throw InputError("public channel: k must lie in [2, 6]");
  const int n = 1 << k;
  return Channel::deterministic(inputs(k, 2), outputs(k, n, n), [k](std::span<const int> x) {
    int idx = 0;
    for (int v : x) idx = idx * 2 + v;
    return std::vector<int>(static_cast<std::size_t>(k + 1), idx);
  });
}

Channel constant_channel(int k) {
  return Channel::deterministic(inputs(k, 2), outputs(k, 1, 1),
                                [k](std::span<const int>) { return std::vector<int>(static_cast<std::size_t>(k + 1), 0); });
}

Channel bsc_channel(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw InputError("bsc channel: crossover outside [0, 1]");
  std::vector<double> probs;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y1 = 0; y1 < 2; ++y1)
        for (int y2 = 0; y2 < 2; ++y2)
          for (int z = 0; z < 2; ++z)
            probs.push_back(bern(y1 ^ x2, p) * bern(y2 ^ x1, p) * bern(z ^ x1 ^ x2, q));
  return Channel(inputs(2, 2), outputs(2, 2, 2), std::move(probs));
}

keybound::WiMWCSystem source_model_system(double alpha, double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw InputError("source model: crossover outside [0, 1]");
  std::vector<double> probs;
  for (int y1 = 0; y1 < 2; ++y1)
    for (int y2 = 0; y2 < 2; ++y2)
      for (int z = 0; z < 2; ++z) probs.push_back(0.5 * bern(y1 ^ y2, p) * bern(z ^ y1, q));
  Channel source(inputs(2, 1), outputs(2, 2, 2), std::move(probs));
  return {2, 2, std::move(source), {{public_noiseless_channel(2), alpha}}};
}

keybound::WiMWCSystem bsc_system(double alpha, double p, double q) {
  return {2, 2, bsc_channel(p, q), {{public_noiseless_channel(2), alpha}}};
}

keybound::WiMWCSystem public_system() { return {2, 2, public_noiseless_channel(2), {}}; }

namespace {

const std::vector<VarSpec> kMacIn = {{"X1", 2}, {"X2", 2}};

}  // namespace

macregion::GenFeedbackMAC adder_mac() {
  return macregion::GenFeedbackMAC(Channel::deterministic(
      kMacIn, {{"Y", 3}, {"YF1", 1}, {"YF2", 1}},
      [](std::span<const int> x) { return std::vector<int>{x[0] + x[1], 0, 0}; }));
}

macregion::GenFeedbackMAC adder_mac_noisy_feedback(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("noisy feedback: crossover outside [0, 1]");
  std::vector<double> probs;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y = 0; y < 3; ++y)
        for (int f1 = 0; f1 < 2; ++f1)
          for (int f2 = 0; f2 < 2; ++f2)
            probs.push_back((y == x1 + x2 ? 1.0 : 0.0) * bern(f1 ^ x2, eps) * bern(f2 ^ x1, eps));
  return macregion::GenFeedbackMAC(Channel(kMacIn, {{"Y", 3}, {"YF1", 2}, {"YF2", 2}}, std::move(probs)));
}

macregion::GenFeedbackMAC pair_mac() {
  return macregion::GenFeedbackMAC(Channel::deterministic(
      kMacIn, {{"Y", 4}, {"YF1", 1}, {"YF2", 1}},
      [](std::span<const int> x) { return std::vector<int>{2 * x[0] + x[1], 0, 0}; }));
}

macregion::GenFeedbackMAC constant_mac() {
  return macregion::GenFeedbackMAC(Channel::deterministic(
      kMacIn, {{"Y", 1}, {"YF1", 1}, {"YF2", 1}}, [](std::span<const int>) { return std::vector<int>{0, 0, 0}; }));
}

std::vector<std::pair<std::string, std::string>> catalog() {
  return {
      {"public-system", "system: public noiseless channel, k = 2"},
      {"source-model-system", "system: source-model main channel plus a public channel at rate 1"},
      {"bsc-system", "system: BSC-based main channel plus a public channel at rate 1"},
      {"public-channel", "channel: public noiseless, k = 2"},
      {"bsc-channel", "channel: BSC-based, k = 2"},
      {"adder-mac", "mac: Y = X1 + X2, feedback Y only"},
      {"adder-mac-noisy-feedback", "mac: adder with extra BSC(0.2) feedback of the other input"},
      {"pair-mac", "mac: Y = (X1, X2)"},
      {"constant-mac", "mac: Y constant"},
  };
}

std::string by_name(const std::string& name) {
  if (name == "public-system") return io::system_json(public_system());
  if (name == "source-model-system") return io::system_json(source_model_system());
  if (name == "bsc-system") return io::system_json(bsc_system());
  if (name == "public-channel") return io::channel_json(public_noiseless_channel(2));
  if (name == "bsc-channel") return io::channel_json(bsc_channel());
  if (name == "adder-mac") return io::channel_json(adder_mac().channel());
  if (name == "adder-mac-noisy-feedback") return io::channel_json(adder_mac_noisy_feedback().channel());
  if (name == "pair-mac") return io::channel_json(pair_mac().channel());
  if (name == "constant-mac") return io::channel_json(constant_mac().channel());
  throw InputError("unknown preset '" + name + "'");
}

}  // namespace wimwc::presets
