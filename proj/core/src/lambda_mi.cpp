#include "wimwc/lambda_mi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "wimwc/errors.hpp"

namespace wimwc {

using fracpart::FractionalPartition;
using fracpart::Partition;
using fracpart::Subset;

namespace {

// Entropies of unions of groups (plus a fixed conditioning set) evaluated on
// the marginal over exactly the variables involved.
class GroupEntropies {
 public:
  GroupEntropies(const JointDist& d, const Groups& groups, const NameSet& cond) {
    std::set<std::string> seen;
    auto claim = [&](const std::string& n) {
      if (!seen.insert(n).second) throw InputError("variable '" + n + "' appears in more than one argument");
    };
    if (groups.empty()) throw InputError("at least one group is required");
    for (const auto& g : groups) {
      if (g.empty()) throw InputError("empty group");
      for (const auto& n : g) claim(n);
    }
    for (const auto& n : cond) claim(n);

    NameSet all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    all.insert(all.end(), cond.begin(), cond.end());
    marginal_ = std::make_unique<JointDist>(marginalize(d, all));
    cards_ = marginal_->cards();

    for (const auto& g : groups) {
      std::vector<std::size_t> ax;
      for (const auto& n : g) ax.push_back(marginal_->axis(n));
      group_axes_.push_back(std::move(ax));
    }
    for (const auto& n : cond) cond_axes_.push_back(marginal_->axis(n));
    h_cond_ = cond.empty() ? 0.0 : entropy_of_axes(cond_axes_);
  }

  /// H(groups in mask, cond) - H(cond).
  double cond_entropy(Subset mask) const {
    if (mask == 0) return 0.0;
    std::vector<std::size_t> ax = cond_axes_;
    for (std::size_t i = 0; i < group_axes_.size(); ++i)
      if (mask & (Subset{1} << i)) ax.insert(ax.end(), group_axes_[i].begin(), group_axes_[i].end());
    return entropy_of_axes(ax) - h_cond_;
  }

  /// Unconditional entropy of the groups in mask (cond ignored).
  double plain_entropy(Subset mask) const {
    std::vector<std::size_t> ax;
    for (std::size_t i = 0; i < group_axes_.size(); ++i)
      if (mask & (Subset{1} << i)) ax.insert(ax.end(), group_axes_[i].begin(), group_axes_[i].end());
    return ax.empty() ? 0.0 : entropy_of_axes(ax);
  }

 private:
  double entropy_of_axes(std::vector<std::size_t> ax) const {
    std::sort(ax.begin(), ax.end());
    return entropy_of(sum_to_axes(marginal_->probs(), cards_, ax));
  }

  std::unique_ptr<JointDist> marginal_;
  std::vector<int> cards_;
  std::vector<std::vector<std::size_t>> group_axes_;
  std::vector<std::size_t> cond_axes_;
  double h_cond_ = 0.0;
};

int group_count(const Groups& groups) {
  if (groups.size() > static_cast<std::size_t>(fracpart::kMaxK))
    throw SizeError("too many groups");
  return static_cast<int>(groups.size());
}

double j_over_blocks(const GroupEntropies& ge, const Partition& pi) {
  double s = 0.0;
  for (auto b : pi.blocks) s += ge.plain_entropy(b);
  return s - ge.plain_entropy(fracpart::full_set(pi.k));
}

}  // namespace

double i_lambda(const JointDist& d, const Groups& groups, const FractionalPartition& fp,
                const NameSet& cond) {
  const int k = group_count(groups);
  if (fp.k() != k) throw InputError("i_lambda: fractional partition is over a different number of groups");
  fracpart::require_valid(fp);
  const GroupEntropies ge(d, groups, cond);
  const Subset all = fracpart::full_set(k);
  const double h_all = ge.cond_entropy(all);
  double v = h_all;
  for (const auto& [b, w] : fp.support()) v -= w * (h_all - ge.cond_entropy(all & ~b));
  return v;
}

LambdaTerms lambda_terms(const JointDist& d, const Groups& groups, const NameSet& cond) {
  const int k = group_count(groups);
  if (k < 2) throw InputError("lambda_terms: need at least two groups");
  const GroupEntropies ge(d, groups, cond);
  const Subset all = fracpart::full_set(k);
  LambdaTerms t;
  t.joint = ge.cond_entropy(all);
  t.block_entropy.assign(std::size_t{1} << k, 0.0);
  for (Subset b = 1; b < all; ++b) t.block_entropy[b] = t.joint - ge.cond_entropy(all & ~b);
  return t;
}

double j_info(const JointDist& d, const Groups& groups) {
  const int k = group_count(groups);
  const GroupEntropies ge(d, groups, {});
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += ge.plain_entropy(Subset{1} << i);
  return s - ge.plain_entropy(fracpart::full_set(k));
}

Example3Result example3_check(const JointDist& d, const Groups& groups,
                              const std::optional<Partition>& blocks) {
  const int k = group_count(groups);
  Example3Result res;
  if (!blocks) {
    res.i_lambda = i_lambda(d, groups, fracpart::preset_uniform_km1(k));
    res.j_based = j_info(d, groups) / (k - 1);
  } else {
    if (blocks->k != k) throw InputError("example3_check: partition is over a different number of groups");
    res.i_lambda = i_lambda(d, groups, fracpart::preset_partition(*blocks));
    const GroupEntropies ge(d, groups, {});
    res.j_based = j_over_blocks(ge, *blocks) / (blocks->r() - 1);
  }
  res.gap = res.i_lambda - res.j_based;
  return res;
}

std::vector<Partition> set_partitions(int k) {
  if (k < 1) throw InputError("set_partitions: k must be positive");
  if (k > kMaxPartitionK) throw SizeError("set_partitions: k exceeds 8");
  std::vector<Partition> out;
  // Restricted growth string a: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(k), 0);
  while (true) {
    Partition pi{k, {}};
    for (int i = 0; i < k; ++i) {
      const auto blk = static_cast<std::size_t>(a[static_cast<std::size_t>(i)]);
      if (blk >= pi.blocks.size()) pi.blocks.resize(blk + 1, 0);
      pi.blocks[blk] |= Subset{1} << i;
    }
    out.push_back(std::move(pi));
    int i = k - 1;
    while (i > 0 && a[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
    if (i == 0) break;
    ++a[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) a[static_cast<std::size_t>(j)] = 0;
    for (int j = i; j < k; ++j)
      prefix_max[static_cast<std::size_t>(j)] =
          std::max(prefix_max[static_cast<std::size_t>(j - 1)], a[static_cast<std::size_t>(j)]);
  }
  return out;
}

Thm41Result thm41_check(const JointDist& d, const Groups& groups, const FractionalPartition& fp) {
  const int k = group_count(groups);
  if (k > kMaxPartitionK) throw SizeError("thm41_check: k exceeds 8");
  Thm41Result res;
  res.lhs = i_lambda(d, groups, fp);
  const GroupEntropies ge(d, groups, {});
  res.rhs_min = std::numeric_limits<double>::infinity();
  for (auto& pi : set_partitions(k)) {
    if (pi.r() < 2) continue;
    const double v = j_over_blocks(ge, pi) / (pi.r() - 1);
    if (v < res.rhs_min) {
      res.rhs_min = v;
      res.argmin = std::move(pi);
    }
  }
  return res;
}

double fano_penalty(Subset keyset, double eps, const FractionalPartition& fp, const std::vector<int>& cards,
                    FanoSum sum) {
  const int k = fp.k();
  if (cards.size() != static_cast<std::size_t>(k)) throw InputError("fano_penalty: need one cardinality per index");
  if (keyset == 0 || (keyset & ~fracpart::full_set(k))) throw InputError("fano_penalty: key set must be a nonempty subset of [k]");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("fano_penalty: eps outside [0, 1]");
  for (Subset b = 1; b < fracpart::full_set(k); ++b)
    if (fracpart::contains(b, keyset) && std::abs(fp.weight(b)) > fracpart::kZeroWeight)
      throw InputError("fano_penalty: weight on " + fracpart::format_subset(b, k) + " which contains the key set");
  double log_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    if (cards[static_cast<std::size_t>(i)] < 1) throw InputError("fano_penalty: cardinality < 1");
    if (sum == FanoSum::kAll || (keyset & (Subset{1} << i))) log_sum += std::log2(cards[static_cast<std::size_t>(i)]);
  }
  return fp.total_weight() * (binary_entropy(eps) + eps * log_sum);
}

DataProcessingResult data_processing_gap(const JointDist& d, const Groups& groups, const FractionalPartition& fp,
                                         const std::vector<Channel>& local_channels) {
  if (local_channels.size() != groups.size())
    throw InputError("data_processing_gap: need exactly one local channel per group");
  DataProcessingResult res;
  res.before = i_lambda(d, groups, fp);
  JointDist cur = d;
  Groups outs;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& ch = local_channels[i];
    for (const auto& v : ch.in_vars())
      if (std::find(groups[i].begin(), groups[i].end(), v.name) == groups[i].end())
        throw InputError("data_processing_gap: channel " + std::to_string(i + 1) + " reads foreign variable '" + v.name + "'");
    cur = push_through(cur, ch);
    NameSet g;
    for (const auto& v : ch.out_vars()) g.push_back(v.name);
    outs.push_back(std::move(g));
  }
  res.after = i_lambda(cur, outs, fp);
  return res;
}

}  // namespace wimwc
