#pragma once

// lambda-mutual information among grouped variables and the total-correlation
// style k-mutual information J, with the checks that relate them.
//
// A "group" is the set of variable names held by one terminal, so compound
// arguments such as (X_i, Y_i) need no flattening.

#include <optional>
#include <vector>

#include "wimwc/dist.hpp"
#include "wimwc/fracpart.hpp"

namespace wimwc {

using Groups = std::vector<NameSet>;

/// H(all groups | cond) - sum_B lambda_B H(groups in B | groups not in B, cond).
/// Throws InputError for an invalid partition or overlapping arguments.
double i_lambda(const JointDist& d, const Groups& groups, const fracpart::FractionalPartition& fp,
                const NameSet& cond = {});

/// Entropy of each group B (by mask) conditioned on the remaining groups and
/// cond, indexed by mask. i_lambda is H(all | cond) minus the lambda-weighted
/// sum of these; it is affine in lambda.
struct LambdaTerms {
  double joint = 0.0;                // H(all groups | cond)
  std::vector<double> block_entropy; // H(groups_B | groups_{B^c}, cond), size 2^k
};
LambdaTerms lambda_terms(const JointDist& d, const Groups& groups, const NameSet& cond = {});

/// sum_i H(group_i) - H(all groups).
double j_info(const JointDist& d, const Groups& groups);

struct Example3Result {
  double i_lambda = 0.0;
  double j_based = 0.0;  // J / (k-1), or J over the blocks / (r-1)
  double gap = 0.0;      // i_lambda - j_based
};

/// Uniform (k-1)-subset weights when blocks is empty, otherwise the
/// partition-induced weights for the given partition of the groups.
Example3Result example3_check(const JointDist& d, const Groups& groups,
                              const std::optional<fracpart::Partition>& blocks = std::nullopt);

/// All set partitions of [k] in restricted-growth-string order.
std::vector<fracpart::Partition> set_partitions(int k);

inline constexpr int kMaxPartitionK = 8;

struct Thm41Result {
  double lhs = 0.0;
  double rhs_min = 0.0;
  fracpart::Partition argmin;
};

/// lhs = i_lambda; rhs_min = min over partitions with r >= 2 of J(blocks)/(r-1).
Thm41Result thm41_check(const JointDist& d, const Groups& groups,
                        const fracpart::FractionalPartition& fp);

enum class FanoSum {
  kKeySet,  // sum of log|X_i| over i in A
  kAll,     // sum over all of [k]
};

/// (sum_B lambda_B)(H2(eps) + eps sum log2|X_i|). The weights are used as
/// given and need not form a valid partition, but must vanish on every B
/// containing A.
double fano_penalty(fracpart::Subset keyset, double eps, const fracpart::FractionalPartition& fp,
                    const std::vector<int>& cards, FanoSum sum = FanoSum::kKeySet);

struct DataProcessingResult {
  double before = 0.0;
  double after = 0.0;
};

/// Pushes each group through its own local channel and compares i_lambda of
/// the inputs with i_lambda of the outputs. Channel i may read only group i.
DataProcessingResult data_processing_gap(const JointDist& d, const Groups& groups,
                                         const fracpart::FractionalPartition& fp,
                                         const std::vector<Channel>& local_channels);

}  // namespace wimwc
