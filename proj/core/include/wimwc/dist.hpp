#pragma once

// Exact dense discrete distributions and the entropy kernels built on them.
//
// A JointDist is a row-major tensor with one axis per named variable (the
// first variable varies slowest). A Channel is a row-stochastic tensor indexed
// by (inputs..., outputs...). All information quantities are in bits.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wimwc {

/// Hard cap on the number of cells of any dense tensor.
inline constexpr std::size_t kMaxCells = std::size_t{1} << 24;

/// Tolerance on total probability mass and on channel row sums.
inline constexpr double kMassTol = 1e-9;

/// Negative entries no smaller than this are treated as round-off and clamped.
inline constexpr double kClampTol = 1e-12;

struct VarSpec {
  std::string name;
  int card = 1;

  friend bool operator==(const VarSpec&, const VarSpec&) = default;
};

using NameSet = std::vector<std::string>;

/// Number of cells of the product alphabet; throws SizeError above kMaxCells.
std::size_t cell_count(std::span<const VarSpec> vars);

class JointDist {
 public:
  /// Validates names, cardinalities, shape, sign and total mass.
  JointDist(std::vector<VarSpec> vars, std::vector<double> probs);

  static JointDist uniform(std::vector<VarSpec> vars);
  static JointDist point_mass(std::vector<VarSpec> vars, std::span<const int> outcome);

  const std::vector<VarSpec>& vars() const noexcept { return vars_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::vector<int> cards() const;
  NameSet names() const;

  bool has(std::string_view name) const noexcept;
  /// Axis index of a variable; throws InputError for unknown names.
  std::size_t axis(std::string_view name) const;
  /// Sorted, de-duplicated axis indices; throws on unknown or repeated names.
  std::vector<std::size_t> axes(const NameSet& names) const;

  double at(std::span<const int> outcome) const;

 private:
  std::vector<VarSpec> vars_;
  std::vector<double> probs_;
};

class Channel {
 public:
  /// probs is indexed row-major by (in_vars..., out_vars...). Every input row
  /// must sum to 1 within kMassTol.
  Channel(std::vector<VarSpec> in_vars, std::vector<VarSpec> out_vars, std::vector<double> probs);

  /// Builds a deterministic channel from a map of input outcome to output outcome.
  static Channel deterministic(std::vector<VarSpec> in_vars, std::vector<VarSpec> out_vars,
                               const std::function<std::vector<int>(std::span<const int>)>& fn);

  const std::vector<VarSpec>& in_vars() const noexcept { return in_vars_; }
  const std::vector<VarSpec>& out_vars() const noexcept { return out_vars_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t in_size() const noexcept { return in_size_; }
  std::size_t out_size() const noexcept { return out_size_; }

  std::span<const double> row(std::size_t in_index) const {
    return {probs_.data() + in_index * out_size_, out_size_};
  }
  double at(std::size_t in_index, std::size_t out_index) const {
    return probs_[in_index * out_size_ + out_index];
  }

 private:
  std::vector<VarSpec> in_vars_;
  std::vector<VarSpec> out_vars_;
  std::vector<double> probs_;
  std::size_t in_size_ = 1;
  std::size_t out_size_ = 1;
};

/// Decodes a row-major flat index into per-axis outcomes.
std::vector<int> unravel(std::size_t index, std::span<const int> cards);
/// Encodes per-axis outcomes into a row-major flat index.
std::size_t ravel(std::span<const int> outcome, std::span<const int> cards);

/// Sums a row-major tensor down to the given (sorted) axes.
std::vector<double> sum_to_axes(std::span<const double> probs, std::span<const int> cards,
                                std::span<const std::size_t> keep);

/// -sum p log2 p with the 0 log 0 = 0 convention. Accepts unnormalized input.
double entropy_of(std::span<const double> probs);

double entropy(const JointDist& d, const NameSet& subset);
double cond_entropy(const JointDist& d, const NameSet& a, const NameSet& b);
double cond_mutual_info(const JointDist& d, const NameSet& a, const NameSet& b,
                        const NameSet& c = {});

/// Marginal on keep; variables retain their order in d.
JointDist marginalize(const JointDist& d, const NameSet& keep);

/// Joint of d with the channel outputs appended: p(v) ch(out | in).
JointDist push_through(const JointDist& d, const Channel& ch);

double binary_entropy(double eps);

}  // namespace wimwc
