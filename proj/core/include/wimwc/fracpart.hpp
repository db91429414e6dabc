#pragma once

// Fractional partitions of [k]: nonnegative weights on nonempty proper subsets
// such that every index is covered with total weight one.
//
// Subsets are k-bit masks (bit i set <=> terminal i+1 is a member). Canonical
// iteration order is ascending mask value.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wimwc::fracpart {

using Subset = std::uint32_t;

/// Largest k accepted by FractionalPartition.
inline constexpr int kMaxK = 16;
/// Largest k accepted by optimize_linear.
inline constexpr int kMaxLinearK = 12;
/// Largest k accepted by vertices().
inline constexpr int kMaxVertexK = 5;

inline constexpr double kRowTol = 1e-9;
inline constexpr double kZeroWeight = 1e-12;

constexpr Subset full_set(int k) { return (Subset{1} << k) - 1; }
constexpr bool contains(Subset outer, Subset inner) { return (outer & inner) == inner; }

/// Raw weight table. Construction does not validate; call validate().
class FractionalPartition {
 public:
  explicit FractionalPartition(int k);

  int k() const noexcept { return k_; }
  double weight(Subset b) const;
  void set(Subset b, double w);

  /// (subset, weight) pairs with weight above kZeroWeight, ascending mask.
  std::vector<std::pair<Subset, double>> support() const;
  double total_weight() const;
  /// Coverage sum_{B containing i} lambda_B for i = 0..k-1.
  std::vector<double> row_sums() const;

  const std::vector<double>& table() const noexcept { return w_; }

 private:
  int k_;
  std::vector<double> w_;  // indexed by mask, size 2^k
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

ValidationReport validate(const FractionalPartition& fp);

/// Throws InputError with the validation message when fp is invalid.
void require_valid(const FractionalPartition& fp);

/// An ordinary set partition of [k] into disjoint nonempty blocks.
struct Partition {
  int k = 0;
  std::vector<Subset> blocks;

  int r() const noexcept { return static_cast<int>(blocks.size()); }
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Throws InputError unless blocks are nonempty, disjoint and cover [k].
void check_partition(const Partition& pi);

/// Parses "1,2|3" (1-based members, blocks separated by '|').
Partition parse_partition(int k, const std::string& text);
std::string format_partition(const Partition& pi);
std::string format_subset(Subset b, int k);

/// lambda_B = 1/(k-1) on every (k-1)-subset.
FractionalPartition preset_uniform_km1(int k);

/// lambda_{[k] minus P_i} = 1/(r-1) for each block P_i.
FractionalPartition preset_partition(const Partition& pi);

enum class Sense { kMin, kMax };

struct LinearOptimum {
  FractionalPartition lambda;
  double value = 0.0;
};

/// Optimizes sum_B c_B lambda_B over the polytope. objective is indexed by
/// mask (size 2^k; entries for the empty and full set are ignored). Exhaustive
/// vertex enumeration for k <= 5, simplex with Bland's rule above.
LinearOptimum optimize_linear(int k, const std::vector<double>& objective, Sense sense);

/// Simplex with Bland's rule, started from the singleton basis. Valid for any
/// 2 <= k <= kMaxLinearK.
LinearOptimum optimize_linear_simplex(int k, const std::vector<double>& objective, Sense sense);

/// All vertices of the polytope, in order of discovery by column-basis
/// enumeration (lexicographic in ascending masks). k <= 5.
std::vector<FractionalPartition> vertices(int k);

/// True iff lambda_B = 0 for every proper subset B containing {1..r}.
bool admissible_for_keyset(const FractionalPartition& fp, int r);

}  // namespace wimwc::fracpart
