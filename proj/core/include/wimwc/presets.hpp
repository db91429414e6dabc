#pragma once

// Ready-made channels and systems.

#include <string>
#include <vector>

#include "wimwc/dist.hpp"
#include "wimwc/keybound.hpp"
#include "wimwc/macregion.hpp"

namespace wimwc::presets {

/// Binary inputs X1..Xk; every Yi and Z equal the whole input tuple.
Channel public_noiseless_channel(int k = 2);

/// Channel with binary inputs whose outputs are all constant.
Channel constant_channel(int k = 2);

/// Two terminals with binary inputs: Y1 = X2 + N1, Y2 = X1 + N2 (mod 2),
/// Z = X1 + X2 + Nz (mod 2), with N1, N2 ~ Bern(p) and Nz ~ Bern(q).
Channel bsc_channel(double p = 0.1, double q = 0.3);

/// Main channel is a source (unit input alphabets) emitting a doubly
/// symmetric bit pair with crossover p that Z sees through a BSC(q); one
/// public noiseless parallel channel runs at rate alpha.
keybound::WiMWCSystem source_model_system(double alpha = 1.0, double p = 0.1, double q = 0.25);

/// bsc_channel as the main channel and a public noiseless parallel channel.
keybound::WiMWCSystem bsc_system(double alpha = 1.0, double p = 0.1, double q = 0.3);

/// Public noiseless channel alone.
keybound::WiMWCSystem public_system();

/// Y = X1 + X2 in {0, 1, 2}; the extra feedback YF1, YF2 is constant.
macregion::GenFeedbackMAC adder_mac();
/// Adder MAC where transmitter i also sees the other input through a BSC(eps).
macregion::GenFeedbackMAC adder_mac_noisy_feedback(double eps = 0.2);
/// Y = (X1, X2), no extra feedback.
macregion::GenFeedbackMAC pair_mac();
/// Y constant, no extra feedback.
macregion::GenFeedbackMAC constant_mac();

/// Names accepted by by_name, with a short description.
std::vector<std::pair<std::string, std::string>> catalog();

/// JSON text of a named preset (channel, system or MAC file format).
std::string by_name(const std::string& name);

}  // namespace wimwc::presets
