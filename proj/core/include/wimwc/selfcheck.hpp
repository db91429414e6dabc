#pragma once

// Random instance generators and the property suite behind `wimwc props`.

#include <cstdint>
#include <string>
#include <vector>

#include "wimwc/dbbound.hpp"
#include "wimwc/dist.hpp"
#include "wimwc/fracpart.hpp"
#include "wimwc/optim.hpp"

namespace wimwc::selfcheck {

/// Random law on the given variables; with probability sparsity each cell is zeroed first.
JointDist random_dist(optim::Rng& rng, std::vector<VarSpec> vars, double sparsity = 0.2);
Channel random_channel(optim::Rng& rng, std::vector<VarSpec> in, std::vector<VarSpec> out, double sparsity = 0.2);
/// Variables prefix1..prefixN with cardinalities uniform in [min_card, max_card].
std::vector<VarSpec> random_vars(optim::Rng& rng, const std::string& prefix, int count, int min_card, int max_card);

fracpart::Partition random_partition(optim::Rng& rng, int k, int min_blocks = 1);
/// Random convex mixture of polytope vertices (k <= 5) or partition presets.
fracpart::FractionalPartition random_fp(optim::Rng& rng, int k);

struct RandomCode {
  dbbound::InteractiveCode code;
  std::vector<Channel> channels;
  Channel aux;
};

/// Binary channel alphabets, W alphabets in [1, max_w], random encoders, one or
/// two channels, and a random binary auxiliary receiver for the first channel
/// (reused when both channels share alphabets).
RandomCode random_code(optim::Rng& rng, int k, int n, int max_w = 2);

struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // smallest (rhs - lhs); equalities use -|gap|
};

struct PropsOptions {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  double scale = 1.0;  // multiplies every instance count
};

struct PropsReport {
  std::vector<PropertyResult> results;
  bool ok() const;
};

PropsReport run_properties(const PropsOptions& opts);

/// Fixed-width text table, 6 decimals.
std::string format_report(const PropsReport& rep);
std::string report_json(const PropsReport& rep);

}  // namespace wimwc::selfcheck
