#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's entropy, partition, LP or simulation code; only the plain data
// accessors of JointDist and Channel are used.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wimwc/dbbound.hpp"
#include "wimwc/dist.hpp"

namespace oracle {

using Names = std::vector<std::string>;

// Marginal by accumulating every cell into a map keyed by the selected outcome.
inline std::map<std::vector<int>, double> marginal(const wimwc::JointDist& d, const Names& names) {
  const auto& vars = d.vars();
  std::vector<std::size_t> pos;
  for (const auto& n : names)
    for (std::size_t a = 0; a < vars.size(); ++a)
      if (vars[a].name == n) pos.push_back(a);
  std::map<std::vector<int>, double> m;
  std::vector<int> outcome(vars.size(), 0);
  for (std::size_t cell = 0; cell < d.size(); ++cell) {
    std::size_t rem = cell;
    for (std::size_t a = vars.size(); a-- > 0;) {
      outcome[a] = static_cast<int>(rem % static_cast<std::size_t>(vars[a].card));
      rem /= static_cast<std::size_t>(vars[a].card);
    }
    std::vector<int> key;
    for (auto p : pos) key.push_back(outcome[p]);
    m[key] += d.probs()[cell];
  }
  return m;
}

inline double H(const wimwc::JointDist& d, const Names& names) {
  if (names.empty()) return 0.0;
  double h = 0.0;
  for (const auto& [k, p] : marginal(d, names))
    if (p > 0.0) h -= p * std::log(p) / std::log(2.0);
  return h;
}

inline Names join(Names a, const Names& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline double Hc(const wimwc::JointDist& d, const Names& a, const Names& b) { return H(d, join(a, b)) - H(d, b); }

inline double I(const wimwc::JointDist& d, const Names& a, const Names& b, const Names& c = {}) {
  return H(d, join(a, c)) + H(d, join(b, c)) - H(d, join(join(a, b), c)) - H(d, c);
}

// Weights keyed by sorted 0-based member lists.
using Weights = std::map<std::vector<int>, double>;

inline double i_lambda(const wimwc::JointDist& d, const std::vector<Names>& groups, const Weights& w,
                       const Names& cond = {}) {
  Names all;
  for (const auto& g : groups) all = join(all, g);
  double v = Hc(d, all, cond);
  for (const auto& [members, lam] : w) {
    Names in, out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const bool inside = std::find(members.begin(), members.end(), static_cast<int>(i)) != members.end();
      (inside ? in : out) = join(inside ? in : out, groups[i]);
    }
    v -= lam * Hc(d, in, join(out, cond));
  }
  return v;
}

inline double total_correlation(const wimwc::JointDist& d, const std::vector<Names>& groups) {
  Names all;
  double s = 0.0;
  for (const auto& g : groups) {
    s += H(d, g);
    all = join(all, g);
  }
  return s - H(d, all);
}

// Set partitions of {0..k-1} as label vectors, from all k^k labelings kept
// only when labels appear in first-occurrence order.
inline std::vector<std::vector<int>> partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> lab(static_cast<std::size_t>(k), 0);
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(k);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int i = 0; i < k; ++i) {
      lab[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::size_t>(k));
      c /= static_cast<std::size_t>(k);
    }
    int next = 0;
    bool canon = true;
    for (int l : lab) {
      if (l > next) {
        canon = false;
        break;
      }
      if (l == next) ++next;
    }
    if (canon) out.push_back(lab);
  }
  return out;
}

// min over partitions with at least two blocks of J(blocks) / (r - 1).
inline double partition_bound(const wimwc::JointDist& d, const std::vector<Names>& groups) {
  double best = 1e300;
  for (const auto& lab : partitions(static_cast<int>(groups.size()))) {
    const int r = *std::max_element(lab.begin(), lab.end()) + 1;
    if (r < 2) continue;
    std::vector<Names> blocks(static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < groups.size(); ++i)
      blocks[static_cast<std::size_t>(lab[i])] = join(blocks[static_cast<std::size_t>(lab[i])], groups[i]);
    best = std::min(best, total_correlation(d, blocks) / (r - 1));
  }
  return best;
}

// Basic feasible solutions of {lambda >= 0, sum_{B contains i} lambda_B = 1},
// found by trying every k-column subset and solving with Gauss-Jordan.
// Each solution is a dense vector indexed by mask.
inline std::vector<std::vector<double>> polytope_vertices(int k) {
  const int full = (1 << k) - 1;
  std::vector<int> cols;
  for (int b = 1; b < full; ++b) cols.push_back(b);
  std::vector<std::vector<double>> out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  const int m = static_cast<int>(cols.size());
  for (;;) {
    std::vector<std::vector<double>> a(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k + 1)));
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            (cols[static_cast<std::size_t>(pick[static_cast<std::size_t>(c)])] >> r) & 1;
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = 1.0;
    }
    bool singular = false;
    for (int c = 0; c < k && !singular; ++c) {
      int piv = -1;
      double bestv = 1e-9;
      for (int r = c; r < k; ++r)
        if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) > bestv) {
          bestv = std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
          piv = r;
        }
      if (piv < 0) {
        singular = true;
        break;
      }
      std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(piv)]);
      const double d = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      for (auto& v : a[static_cast<std::size_t>(c)]) v /= d;
      for (int r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        for (int cc = 0; cc <= k; ++cc)
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -= f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      }
    }
    if (!singular) {
      bool feasible = true;
      std::vector<double> x(static_cast<std::size_t>(full + 1), 0.0);
      for (int c = 0; c < k; ++c) {
        const double v = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        if (v < -1e-12) feasible = false;
        x[static_cast<std::size_t>(cols[static_cast<std::size_t>(pick[static_cast<std::size_t>(c)])])] = std::max(v, 0.0);
      }
      if (feasible) out.push_back(std::move(x));
    }
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// Exact law of an interactive code by walking the outcome tree. Keys are
// outcomes in the order W_1..W_k, then per step X_1..X_k, Y_1..Y_k, Z[, T].
inline std::map<std::vector<int>, double> code_law(const wimwc::dbbound::InteractiveCode& code,
                                                   const std::vector<wimwc::Channel>& channels,
                                                   const wimwc::Channel* aux) {
  std::map<std::vector<int>, double> law;
  const int k = code.k;
  struct Walker {
    const wimwc::dbbound::InteractiveCode& code;
    const std::vector<wimwc::Channel>& channels;
    const wimwc::Channel* aux;
    std::map<std::vector<int>, double>& law;
    int k;

    void step(int j, std::vector<int>& path, std::vector<std::vector<int>>& hist, double p) {
      if (j == code.n) {
        law[path] += p;
        return;
      }
      const auto& ch = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(j)])];
      std::vector<int> x(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        std::size_t pos = static_cast<std::size_t>(path[static_cast<std::size_t>(i)]);
        for (int s = 0; s < j; ++s) {
          const auto& cs = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(s)])];
          pos = pos * static_cast<std::size_t>(cs.out_vars()[static_cast<std::size_t>(i)].card) +
                static_cast<std::size_t>(hist[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]);
        }
        x[static_cast<std::size_t>(i)] = code.encoders[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][pos];
      }
      std::size_t xi = 0;
      for (int i = 0; i < k; ++i)
        xi = xi * static_cast<std::size_t>(ch.in_vars()[static_cast<std::size_t>(i)].card) + static_cast<std::size_t>(x[static_cast<std::size_t>(i)]);
      const std::size_t no = ch.out_size();
      for (std::size_t o = 0; o < no; ++o) {
        const double po = ch.probs()[xi * no + o];
        if (po <= 0.0) continue;
        // Decode output tuple (Y_1..Y_k, Z).
        std::vector<int> y(static_cast<std::size_t>(k + 1));
        std::size_t rem = o;
        for (int a = k; a >= 0; --a) {
          const auto card = static_cast<std::size_t>(ch.out_vars()[static_cast<std::size_t>(a)].card);
          y[static_cast<std::size_t>(a)] = static_cast<int>(rem % card);
          rem /= card;
        }
        const std::size_t nt = aux ? aux->out_size() : 1;
        for (std::size_t t = 0; t < nt; ++t) {
          const double pt = aux ? aux->probs()[(xi * no + o) * nt + t] : 1.0;
          if (pt <= 0.0) continue;
          const std::size_t mark = path.size();
          path.insert(path.end(), x.begin(), x.end());
          path.insert(path.end(), y.begin(), y.end());
          if (aux) path.push_back(static_cast<int>(t));
          for (int i = 0; i < k; ++i) hist[static_cast<std::size_t>(i)].push_back(y[static_cast<std::size_t>(i)]);
          step(j + 1, path, hist, p * po * pt);
          for (int i = 0; i < k; ++i) hist[static_cast<std::size_t>(i)].pop_back();
          path.resize(mark);
        }
      }
    }
  } walker{code, channels, aux, law, k};

  std::vector<int> w(static_cast<std::size_t>(k), 0);
  for (;;) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= code.w_dists[static_cast<std::size_t>(i)][static_cast<std::size_t>(w[static_cast<std::size_t>(i)])];
    if (p > 0.0) {
      std::vector<int> path = w;
      std::vector<std::vector<int>> hist(static_cast<std::size_t>(k));
      walker.step(0, path, hist, p);
    }
    int i = k - 1;
    while (i >= 0 && ++w[static_cast<std::size_t>(i)] == static_cast<int>(code.w_dists[static_cast<std::size_t>(i)].size())) {
      w[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return law;
}

}  // namespace oracle
