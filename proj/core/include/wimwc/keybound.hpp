#pragma once

// The single-channel functional
//
//   V(q) = max  I_l(X1Y1; ...; XkYk | T) - I_l(X1; ...; Xk) + I(V;T|U) - I(V;Z|U)
//
// over p(x) q(y,z,t|x) p(u,v|x,y), and the secret-key capacity upper bound
// V(main) + sum_l alpha_l V(q_l) of a wiretap multi-way system.
//
// All maximizations are heuristic or grid searches; reported values are lower
// estimates of the true maxima and are never certified.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wimwc/dist.hpp"
#include "wimwc/fracpart.hpp"

namespace wimwc::keybound {

struct ParallelChannel {
  Channel channel;
  double alpha = 0.0;
};

/// Terminals 1..r generate the key. Each channel follows the X1..Xk ->
/// Y1..Yk, Z naming convention; alphabets may differ between channels.
struct WiMWCSystem {
  int k = 2;
  int r = 2;
  Channel main;
  std::vector<ParallelChannel> parallels;
};

void check_system(const WiMWCSystem& sys);

struct OptimizerConfig {
  int restarts = 4;
  std::uint64_t master_seed = 0;
  double step_init = 0.5;
  double tol = 1e-7;
  int max_iters = 400;
  std::optional<int> grid_res;  // exhaustive p(x) grid when set
  std::optional<int> card_u;    // default |X_[k]| + 1
  std::optional<int> card_v;
};

void check_config(const OptimizerConfig& cfg);

/// Auxiliary receiver: either T = Z (built per channel) or an explicit channel
/// reading (X1..Xk, Y1..Yk, Z).
class AuxReceiver {
 public:
  static AuxReceiver copy_z() { return AuxReceiver(std::monostate{}); }
  static AuxReceiver from_channel(Channel ch) { return AuxReceiver(std::move(ch)); }

  bool is_copy_z() const noexcept { return std::holds_alternative<std::monostate>(spec_); }
  /// The receiver channel to use with ch.
  Channel for_channel(const Channel& ch, int k) const;

 private:
  explicit AuxReceiver(std::variant<std::monostate, Channel> spec) : spec_(std::move(spec)) {}
  std::variant<std::monostate, Channel> spec_;
};

/// Deterministic receiver copying Z into T.
Channel t_equals_z(const Channel& ch);

/// Channel X -> (Y1..Yk, Z, T) obtained by feeding ch's inputs and outputs to aux.
Channel compose_aux(const Channel& ch, const Channel& aux);

/// Exact objective for the composed joint p(x) ch(y,z,t|x) puv(u,v|x,y).
/// px is over X1..Xk; puv reads (X1..Xk, Y1..Yk) and emits U, V.
double v_objective(const JointDist& px, const Channel& ch_with_t, const Channel& puv,
                   const fracpart::FractionalPartition& fp, int r);

/// The same objective on flat arrays, with gradients. Joint axes are
/// X1..Xk, Y1..Yk, Z, T, U, V. px has |X| entries; aux has |X||Y| rows of
/// |U||V| entries, row (x, y) holding p(u, v | x, y).
class VObjective {
 public:
  VObjective(const Channel& ch_with_t, const fracpart::FractionalPartition& fp, int card_u, int card_v);
  ~VObjective();
  VObjective(VObjective&&) noexcept;
  VObjective& operator=(VObjective&&) noexcept;

  std::size_t x_size() const noexcept;
  std::size_t y_size() const noexcept;
  std::size_t uv_size() const noexcept;
  std::size_t aux_size() const noexcept { return x_size() * y_size() * uv_size(); }

  double value(std::span<const double> px, std::span<const double> aux) const;
  /// Gradients treat every entry as a free coordinate.
  double value_and_gradient(std::span<const double> px, std::span<const double> aux,
                            std::vector<double>* grad_px, std::vector<double>* grad_aux) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Mode { kHeuristic, kGrid };

struct VResult {
  double value = 0.0;
  std::vector<double> px;
  std::vector<double> puv;
  int card_u = 1;
  int card_v = 1;
  bool converged = true;
  std::size_t evaluations = 0;
};

/// Lower estimate of V for one channel. stream_id separates seed streams of
/// different channels in a system.
VResult v_lambda(const Channel& ch, const Channel& aux, const fracpart::FractionalPartition& fp, int r,
                 const OptimizerConfig& cfg, std::uint64_t stream_id = 0);

struct ChannelBound {
  std::string id;
  double alpha = 1.0;
  VResult v;
};

struct BoundReport {
  double value = 0.0;
  std::vector<ChannelBound> per_channel;
  Mode mode = Mode::kHeuristic;
  bool certified = false;
};

BoundReport theorem1_bound(const WiMWCSystem& sys, const AuxReceiver& aux, const fracpart::FractionalPartition& fp,
                           const OptimizerConfig& cfg);

}  // namespace wimwc::keybound
