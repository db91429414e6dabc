#pragma once

// JSON file formats for distributions, channels, fractional partitions, codes,
// systems and MACs, plus JSON rendering of results.
//
// Probabilities are nested arrays in row-major variable order. Totals (and
// channel rows) within 1e-6 of 1 are renormalized; anything further off is
// rejected. Errors are InputError with a line/column or field path.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wimwc/dbbound.hpp"
#include "wimwc/dist.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/fracpart.hpp"
#include "wimwc/keybound.hpp"
#include "wimwc/macregion.hpp"

namespace wimwc::io {

inline constexpr double kLoadTol = 1e-6;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

JointDist parse_dist(std::string_view text);
Channel parse_channel(std::string_view text);

/// {"k": int, "weights": [{"subset": [1-based indices], "w": real}, ...]}
fracpart::FractionalPartition parse_lambda(std::string_view text);

/// "uniform-km1", "partition:1,2|3", or a path to a lambda file.
fracpart::FractionalPartition lambda_from_arg(const std::string& arg, int k);

struct CodeSpec {
  dbbound::InteractiveCode code;
  std::vector<Channel> channels;
  std::optional<Channel> aux;
};

/// {"k", "n", "w_cards" | "w_dists", "encoders": [[table per step] per terminal],
///  "schedule": [channel index per step], "channels": [channel...], "aux": channel?}
CodeSpec parse_code(std::string_view text);

/// {"k", "r", "main": channel, "parallels": [{"channel": channel, "alpha": real}]}
keybound::WiMWCSystem parse_system(std::string_view text);

/// Channel with inputs X1, X2 and outputs Y, YF1, YF2.
macregion::GenFeedbackMAC parse_mac(std::string_view text);

/// Loads a file and prefixes any error with its path.
template <class F>
auto load(const std::string& path, F&& parse) -> decltype(parse(std::string_view{}));

std::string dist_json(const JointDist& d);
std::string channel_json(const Channel& ch);
std::string lambda_json(const fracpart::FractionalPartition& fp);
std::string system_json(const keybound::WiMWCSystem& sys);
std::string code_json(const CodeSpec& spec);

std::string bound_report_json(const keybound::BoundReport& rep);
std::string lemma1_json(const dbbound::Lemma1Sides& z, const std::optional<dbbound::Lemma1Sides>& t,
                        double memorylessness_gap);
std::string region_json(const macregion::OuterRegion& reg, const macregion::SumRateResult& sum);
/// R1,R2 vertex list with a header line.
std::string region_csv(const macregion::OuterRegion& reg);

/// Human-readable description of every file format, for --help.
std::string_view schema_help();

// ---------------------------------------------------------------- inline

template <class F>
auto load(const std::string& path, F&& parse) -> decltype(parse(std::string_view{})) {
  const std::string text = read_file(path);
  try {
    return parse(std::string_view{text});
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace wimwc::io
