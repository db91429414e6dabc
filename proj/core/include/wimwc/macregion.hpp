#pragma once

// Outer bound for two-user multiple-access channels with generalized feedback
// Y_F1 = (Y, YF1), Y_F2 = (Y, YF2). For p(t1, t2, x1, x2) the rate pairs obey
//
//   R1      <= I(X1; Y YF2 | X2 T1 T2)
//   R2      <= I(X2; Y YF1 | X1 T1 T2)
//   R1 + R2 <= I(X1 X2; Y YF1 YF2 | T1 T2)
//   R1 + R2 <= I(X1 X2; Y | T1)
//
// subject to the dependence-balance constraints
//
//   (6a) I(X1; X2 | T1 T2) <= I(X1; X2 | Y YF1 YF2 T1 T2)
//   (6b) I(X1; X2 | T1)    <= I(X1 YF1; X2 YF2 | T1 Y)
//
// with |T1| <= 5 and |T2| <= |X1||X2| + 3.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wimwc/dist.hpp"
#include "wimwc/keybound.hpp"

namespace wimwc::macregion {

/// Channel from (X1, X2) to (Y, YF1, YF2).
class GenFeedbackMAC {
 public:
  explicit GenFeedbackMAC(Channel channel);
  const Channel& channel() const noexcept { return channel_; }
  int card_x1() const { return channel_.in_vars()[0].card; }
  int card_x2() const { return channel_.in_vars()[1].card; }
  int max_card_t1() const { return 5; }
  int max_card_t2() const { return card_x1() * card_x2() + 3; }

 private:
  Channel channel_;
};

struct RateTerms {
  double r1 = 0.0;        // I(X1; Y YF2 | X2 T1 T2)
  double r2 = 0.0;        // I(X2; Y YF1 | X1 T1 T2)
  double sum_full = 0.0;  // I(X1 X2; Y YF1 YF2 | T1 T2)
  double sum_y = 0.0;     // I(X1 X2; Y | T1)
  double slack_6a = 0.0;  // rhs - lhs of (6a)
  double slack_6b = 0.0;  // rhs - lhs of (6b)
};

/// p must be over T1, T2, X1, X2 (in that order).
RateTerms rate_terms(const JointDist& p, const GenFeedbackMAC& mac);

struct ConstraintReport {
  bool ok = false;
  double slack_6a = 0.0;
  double slack_6b = 0.0;
};

inline constexpr double kSlackTol = 1e-9;

/// ok iff both slacks are >= -1e-9. Enforces the auxiliary cardinality caps.
ConstraintReport constraints_ok(const JointDist& p, const GenFeedbackMAC& mac);

struct MacConfig {
  keybound::OptimizerConfig opt;
  bool drop_6b = false;
  std::optional<int> card_t1;  // default and maximum 5
  std::optional<int> card_t2;  // default and maximum |X1||X2| + 3
};

struct SumRateResult {
  double value = 0.0;
  JointDist witness;
  RateTerms rates;
  bool certified = false;
};

/// Largest R1 + R2 in the region: max over feasible p of
/// min(I(X1;..) + I(X2;..), I(X1X2; Y YF1 YF2 | T1T2), I(X1X2; Y | T1)).
SumRateResult outer_sum_rate(const GenFeedbackMAC& mac, const MacConfig& cfg);

struct OuterRegion {
  /// Polygon vertices: (0,0), then the upper-right frontier from (0, max R2)
  /// to (max R1, .), then (max R1, 0).
  std::vector<std::pair<double, double>> vertices;
  double sum_rate_max = 0.0;
  std::vector<JointDist> witnesses;
  bool certified = false;
};

inline constexpr int kDirections = 33;

/// Weighted-sum scalarization over kDirections weight vectors (mu, 1 - mu),
/// plus the sum-rate search, assembled into a downward-closed convex hull.
/// Feasible warm-start distributions join the witness pool.
OuterRegion outer_region(const GenFeedbackMAC& mac, const MacConfig& cfg,
                         std::span<const JointDist> warm_start = {});

/// Downward-closed convex hull of rate points.
std::vector<std::pair<double, double>> downward_hull(const std::vector<std::pair<double, double>>& points);

/// Whether (r1, r2) lies in the polygon within tol.
bool region_contains(const OuterRegion& region, double r1, double r2, double tol = 1e-6);

}  // namespace wimwc::macregion
