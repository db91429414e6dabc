#include "wimwc/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "wimwc/errors.hpp"

namespace wimwc {

namespace {

void check_specs(std::span<const VarSpec> vars, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& v : vars) {
    if (v.name.empty()) throw InputError(std::string(what) + ": empty variable name");
    if (v.card < 1) throw InputError(std::string(what) + ": variable '" + v.name + "' has cardinality < 1");
    if (!seen.insert(v.name).second)
      throw InputError(std::string(what) + ": duplicate variable name '" + v.name + "'");
  }
}

double clamp_entry(double p, const char* what) {
  if (!std::isfinite(p)) throw InputError(std::string(what) + ": non-finite probability");
  if (p < 0.0) {
    if (p < -kClampTol) {
      std::ostringstream os;
      os << what << ": negative probability " << p;
      throw InputError(os.str());
    }
    return 0.0;
  }
  return p;
}

std::vector<int> cards_of(std::span<const VarSpec> vars) {
  std::vector<int> c;
  c.reserve(vars.size());
  for (const auto& v : vars) c.push_back(v.card);
  return c;
}

}  // namespace

std::size_t cell_count(std::span<const VarSpec> vars) {
  std::size_t n = 1;
  for (const auto& v : vars) {
    if (v.card < 1) throw InputError("variable '" + v.name + "' has cardinality < 1");
    if (n > kMaxCells / static_cast<std::size_t>(v.card))
      throw SizeError("dense tensor exceeds the 2^24 cell cap");
    n *= static_cast<std::size_t>(v.card);
  }
  return n;
}

// ---------------------------------------------------------------- JointDist

JointDist::JointDist(std::vector<VarSpec> vars, std::vector<double> probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
  if (vars_.empty()) throw InputError("joint distribution needs at least one variable");
  check_specs(vars_, "joint distribution");
  const std::size_t n = cell_count(vars_);
  if (probs_.size() != n) {
    std::ostringstream os;
    os << "joint distribution: expected " << n << " probabilities, got " << probs_.size();
    throw InputError(os.str());
  }
  double total = 0.0;
  for (auto& p : probs_) {
    p = clamp_entry(p, "joint distribution");
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    std::ostringstream os;
    os.precision(17);
    os << "joint distribution: total mass " << total << " differs from 1";
    throw InputError(os.str());
  }
}

JointDist JointDist::uniform(std::vector<VarSpec> vars) {
  const std::size_t n = cell_count(vars);
  return JointDist(std::move(vars), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointDist JointDist::point_mass(std::vector<VarSpec> vars, std::span<const int> outcome) {
  const std::size_t n = cell_count(vars);
  const auto c = cards_of(vars);
  if (outcome.size() != c.size()) throw InputError("point mass: outcome arity mismatch");
  std::vector<double> p(n, 0.0);
  p[ravel(outcome, c)] = 1.0;
  return JointDist(std::move(vars), std::move(p));
}

std::vector<int> JointDist::cards() const { return cards_of(vars_); }

NameSet JointDist::names() const {
  NameSet out;
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

bool JointDist::has(std::string_view name) const noexcept {
  return std::any_of(vars_.begin(), vars_.end(), [&](const VarSpec& v) { return v.name == name; });
}

std::size_t JointDist::axis(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  throw InputError("unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> JointDist::axes(const NameSet& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(axis(n));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InputError("variable listed twice in a name set");
  return out;
}

double JointDist::at(std::span<const int> outcome) const {
  const auto c = cards();
  if (outcome.size() != c.size()) throw InputError("outcome arity mismatch");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (outcome[i] < 0 || outcome[i] >= c[i]) throw InputError("outcome out of range");
  return probs_[ravel(outcome, c)];
}

// ------------------------------------------------------------------ Channel

Channel::Channel(std::vector<VarSpec> in_vars, std::vector<VarSpec> out_vars, std::vector<double> probs)
    : in_vars_(std::move(in_vars)), out_vars_(std::move(out_vars)), probs_(std::move(probs)) {
  std::vector<VarSpec> all = in_vars_;
  all.insert(all.end(), out_vars_.begin(), out_vars_.end());
  check_specs(all, "channel");
  if (out_vars_.empty()) throw InputError("channel needs at least one output variable");
  in_size_ = cell_count(in_vars_);
  out_size_ = cell_count(out_vars_);
  const std::size_t n = cell_count(all);
  if (probs_.size() != n) {
    std::ostringstream os;
    os << "channel: expected " << n << " probabilities, got " << probs_.size();
    throw InputError(os.str());
  }
  for (std::size_t x = 0; x < in_size_; ++x) {
    double row_sum = 0.0;
    for (std::size_t y = 0; y < out_size_; ++y) {
      auto& p = probs_[x * out_size_ + y];
      p = clamp_entry(p, "channel");
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > kMassTol) {
      std::ostringstream os;
      os.precision(17);
      os << "channel: row " << x << " sums to " << row_sum;
      throw InputError(os.str());
    }
  }
}

Channel Channel::deterministic(std::vector<VarSpec> in_vars, std::vector<VarSpec> out_vars,
                               const std::function<std::vector<int>(std::span<const int>)>& fn) {
  const auto ic = cards_of(in_vars);
  const auto oc = cards_of(out_vars);
  const std::size_t ni = cell_count(in_vars);
  const std::size_t no = cell_count(out_vars);
  std::vector<double> p(ni * no, 0.0);
  for (std::size_t x = 0; x < ni; ++x) {
    const auto out = fn(unravel(x, ic));
    if (out.size() != oc.size()) throw InputError("deterministic channel: output arity mismatch");
    for (std::size_t i = 0; i < oc.size(); ++i)
      if (out[i] < 0 || out[i] >= oc[i]) throw InputError("deterministic channel: output out of range");
    p[x * no + ravel(out, oc)] = 1.0;
  }
  return Channel(std::move(in_vars), std::move(out_vars), std::move(p));
}

// ------------------------------------------------------------------ kernels

std::vector<int> unravel(std::size_t index, std::span<const int> cards) {
  std::vector<int> out(cards.size(), 0);
  for (std::size_t i = cards.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(cards[i]);
    out[i] = static_cast<int>(index % c);
    index /= c;
  }
  return out;
}

std::size_t ravel(std::span<const int> outcome, std::span<const int> cards) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < cards.size(); ++i)
    idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(outcome[i]);
  return idx;
}

std::vector<double> sum_to_axes(std::span<const double> probs, std::span<const int> cards,
                                std::span<const std::size_t> keep) {
  const std::size_t n_axes = cards.size();
  std::vector<std::size_t> out_stride(n_axes, 0);
  std::size_t out_size = 1;
  for (std::size_t i = keep.size(); i-- > 0;) {
    out_stride[keep[i]] = out_size;
    out_size *= static_cast<std::size_t>(cards[keep[i]]);
  }
  std::vector<double> out(out_size, 0.0);
  if (keep.size() == n_axes) {
    std::copy(probs.begin(), probs.end(), out.begin());
    return out;
  }
  // Trailing axes that are summed out collapse into one contiguous block.
  std::size_t last = n_axes;
  std::size_t block = 1;
  while (last > 0 && out_stride[last - 1] == 0) {
    --last;
    block *= static_cast<std::size_t>(cards[last]);
  }
  std::vector<int> ctr(last, 0);
  std::size_t oidx = 0;
  for (std::size_t base = 0; base < probs.size(); base += block) {
    double s = 0.0;
    for (std::size_t t = 0; t < block; ++t) s += probs[base + t];
    out[oidx] += s;
    for (std::size_t ax = last; ax-- > 0;) {
      if (++ctr[ax] < cards[ax]) {
        oidx += out_stride[ax];
        break;
      }
      oidx -= out_stride[ax] * static_cast<std::size_t>(cards[ax] - 1);
      ctr[ax] = 0;
    }
  }
  return out;
}

double entropy_of(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy(const JointDist& d, const NameSet& subset) {
  if (subset.empty()) throw InputError("entropy: empty variable set");
  const auto keep = d.axes(subset);
  const auto c = d.cards();
  return entropy_of(sum_to_axes(d.probs(), c, keep));
}

namespace {

NameSet checked_union(const NameSet& a, const NameSet& b, const char* what) {
  std::set<std::string> sa(a.begin(), a.end());
  for (const auto& n : b)
    if (sa.count(n)) throw InputError(std::string(what) + ": variable '" + n + "' appears in overlapping sets");
  NameSet u = a;
  u.insert(u.end(), b.begin(), b.end());
  return u;
}

}  // namespace

double cond_entropy(const JointDist& d, const NameSet& a, const NameSet& b) {
  if (a.empty()) throw InputError("cond_entropy: empty target set");
  const NameSet ab = checked_union(a, b, "cond_entropy");
  const double h_ab = entropy(d, ab);
  return b.empty() ? h_ab : h_ab - entropy(d, b);
}

double cond_mutual_info(const JointDist& d, const NameSet& a, const NameSet& b, const NameSet& c) {
  if (a.empty() || b.empty()) throw InputError("cond_mutual_info: empty argument set");
  checked_union(a, b, "cond_mutual_info");
  checked_union(a, c, "cond_mutual_info");
  checked_union(b, c, "cond_mutual_info");
  return cond_entropy(d, a, c) - cond_entropy(d, a, checked_union(b, c, "cond_mutual_info"));
}

JointDist marginalize(const JointDist& d, const NameSet& keep) {
  if (keep.empty()) throw InputError("marginalize: empty keep set");
  const auto axes = d.axes(keep);
  std::vector<VarSpec> vars;
  for (auto a : axes) vars.push_back(d.vars()[a]);
  auto p = sum_to_axes(d.probs(), d.cards(), axes);
  return JointDist(std::move(vars), std::move(p));
}

JointDist push_through(const JointDist& d, const Channel& ch) {
  std::vector<std::size_t> in_axes;
  for (const auto& v : ch.in_vars()) {
    const auto a = d.axis(v.name);
    if (d.vars()[a].card != v.card)
      throw InputError("push_through: cardinality mismatch for '" + v.name + "'");
    in_axes.push_back(a);
  }
  for (const auto& v : ch.out_vars())
    if (d.has(v.name)) throw InputError("push_through: output '" + v.name + "' collides with an existing variable");

  std::vector<VarSpec> vars = d.vars();
  vars.insert(vars.end(), ch.out_vars().begin(), ch.out_vars().end());
  const std::size_t total = cell_count(vars);

  const auto c = d.cards();
  // Stride of each joint axis inside the channel's input index.
  std::vector<std::size_t> in_stride(c.size(), 0);
  std::size_t s = 1;
  for (std::size_t i = in_axes.size(); i-- > 0;) {
    in_stride[in_axes[i]] += s;
    s *= static_cast<std::size_t>(ch.in_vars()[i].card);
  }

  const std::size_t no = ch.out_size();
  std::vector<double> out(total, 0.0);
  std::vector<int> ctr(c.size(), 0);
  std::size_t iidx = 0;
  for (std::size_t cell = 0; cell < d.size(); ++cell) {
    const double p = d.probs()[cell];
    if (p > 0.0) {
      const auto row = ch.row(iidx);
      for (std::size_t o = 0; o < no; ++o) out[cell * no + o] = p * row[o];
    }
    for (std::size_t ax = c.size(); ax-- > 0;) {
      if (++ctr[ax] < c[ax]) {
        iidx += in_stride[ax];
        break;
      }
      iidx -= in_stride[ax] * static_cast<std::size_t>(c[ax] - 1);
      ctr[ax] = 0;
    }
  }
  return JointDist(std::move(vars), std::move(out));
}

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("binary_entropy: argument outside [0, 1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

}  // namespace wimwc
