#pragma once

// Exact simulation of interactive codes over memoryless multi-terminal
// channels, and both sides of the dependence-balance inequality for
// lambda-mutual information.
//
// Channel convention: inputs X1..Xk, outputs Y1..Yk followed by Z. An optional
// auxiliary receiver reads (X1..Xk, Y1..Yk, Z) and emits a single variable T.
//
// Trace variable names: W<i>, X<i>_<j>, Y<i>_<j>, Z_<j>, T_<j> (1-based).

#include <optional>
#include <string>
#include <vector>

#include "wimwc/dist.hpp"
#include "wimwc/fracpart.hpp"

namespace wimwc::dbbound {

/// Encoder tables are flat lookups over (w_i, y_i1, ..., y_i(j-1)) in
/// row-major order with w_i slowest; entries are input symbols for step j.
struct InteractiveCode {
  int k = 0;
  int n = 0;
  std::vector<std::vector<double>> w_dists;             // [i] -> p(w_i)
  std::vector<std::vector<std::vector<int>>> encoders;  // [i][j] -> table
  std::vector<int> schedule;                            // [j] -> channel index
};

/// Checks the channel naming convention for k terminals.
void check_terminal_channel(const Channel& ch, int k);
/// Checks that aux reads (X, Y, Z) of ch with matching cardinalities and emits one variable.
void check_aux_channel(const Channel& aux, const Channel& ch, int k);

/// Size of the encoder domain for terminal i (0-based) at step j (0-based).
std::size_t encoder_domain(const InteractiveCode& code, const std::vector<Channel>& channels, int i, int j);

std::string w_name(int i);
std::string x_name(int i, int j);
std::string y_name(int i, int j);
std::string z_name(int j);
std::string t_name(int j);

/// Exact joint law of a code run. The base tensor holds (W_1..W_k) followed by
/// (Y_1j..Y_kj, Z_j[, T_j]) for j = 1..n; channel inputs are deterministic
/// functions of the base variables and are materialized on demand.
class TraceDist {
 public:
  TraceDist(InteractiveCode code, std::vector<Channel> channels, JointDist base, bool has_aux);

  const InteractiveCode& code() const noexcept { return code_; }
  const JointDist& base() const noexcept { return base_; }
  bool has_aux() const noexcept { return has_aux_; }
  int k() const noexcept { return code_.k; }
  int n() const noexcept { return code_.n; }

  /// Joint law of the named variables (base or derived X), in all_names() order.
  JointDist marginal(const NameSet& names) const;
  /// Full joint including every X axis; subject to the cell cap.
  JointDist materialize() const;
  /// Every variable name, in materialize() order.
  NameSet all_names() const;

 private:
  int x_card(int i, int j) const;

  InteractiveCode code_;
  std::vector<Channel> channels_;
  JointDist base_;
  bool has_aux_;
};

/// Forward recursion over the code. channels[schedule[j]] is used at step j.
TraceDist simulate_code(const InteractiveCode& code, const std::vector<Channel>& channels,
                        const std::optional<Channel>& aux = std::nullopt);

/// max_j I(Y_j Z_j [T_j] ; past | X_j), which is zero for a memoryless channel.
double memorylessness_gap(const TraceDist& trace);

enum class Conditioning { kZ, kT };

struct Lemma1Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double w_dependence = 0.0;  // I_lambda(W_1; ...; W_k)
  std::vector<double> rhs_terms;  // per step
};

/// lhs = I_l(W_i Y_i^n ; ... | C^n) - I_l(W_1; ...; W_k),
/// rhs = sum_j [I_l(X_ij Y_ij ; ... | C^j) - I_l(X_1j; ...; X_kj | C^{j-1})],
/// where C is Z or the auxiliary T.
Lemma1Sides lemma1_sides(const TraceDist& trace, const fracpart::FractionalPartition& fp, Conditioning cond);

}  // namespace wimwc::dbbound
