#include "wimwc/fracpart.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "wimwc/errors.hpp"

namespace wimwc::fracpart {

namespace {

void check_k(int k, int max_k, const char* what) {
  if (k < 2) throw InputError(std::string(what) + ": k must be at least 2");
  if (k > max_k) {
    std::ostringstream os;
    os << what << ": k = " << k << " exceeds the supported maximum " << max_k;
    throw SizeError(os.str());
  }
}

double objective_value(const FractionalPartition& fp, const std::vector<double>& c) {
  double v = 0.0;
  for (const auto& [b, w] : fp.support()) v += c[b] * w;
  return v;
}

}  // namespace

FractionalPartition::FractionalPartition(int k) : k_(k) {
  check_k(k, kMaxK, "fractional partition");
  w_.assign(std::size_t{1} << k, 0.0);
}

double FractionalPartition::weight(Subset b) const {
  if (b >= w_.size()) throw InputError("fractional partition: subset outside [k]");
  return w_[b];
}

void FractionalPartition::set(Subset b, double w) {
  if (b >= w_.size()) throw InputError("fractional partition: subset outside [k]");
  if (!std::isfinite(w)) throw InputError("fractional partition: non-finite weight");
  w_[b] = w;
}

std::vector<std::pair<Subset, double>> FractionalPartition::support() const {
  std::vector<std::pair<Subset, double>> out;
  for (Subset b = 1; b < full_set(k_); ++b)
    if (std::abs(w_[b]) > kZeroWeight) out.emplace_back(b, w_[b]);
  return out;
}

double FractionalPartition::total_weight() const {
  double s = 0.0;
  for (Subset b = 1; b < full_set(k_); ++b) s += w_[b];
  return s;
}

std::vector<double> FractionalPartition::row_sums() const {
  std::vector<double> rows(static_cast<std::size_t>(k_), 0.0);
  for (Subset b = 1; b < full_set(k_); ++b) {
    if (w_[b] == 0.0) continue;
    for (int i = 0; i < k_; ++i)
      if (b & (Subset{1} << i)) rows[static_cast<std::size_t>(i)] += w_[b];
  }
  return rows;
}

ValidationReport validate(const FractionalPartition& fp) {
  const int k = fp.k();
  std::ostringstream os;
  if (std::abs(fp.weight(0)) > kZeroWeight) {
    os << "empty subset carries weight " << fp.weight(0);
    return {false, os.str()};
  }
  if (std::abs(fp.weight(full_set(k))) > kZeroWeight) {
    os << "full set [" << k << "] carries weight " << fp.weight(full_set(k));
    return {false, os.str()};
  }
  for (Subset b = 1; b < full_set(k); ++b) {
    if (fp.weight(b) < -kZeroWeight) {
      os << "negative weight " << fp.weight(b) << " on subset " << format_subset(b, k);
      return {false, os.str()};
    }
  }
  const auto rows = fp.row_sums();
  for (int i = 0; i < k; ++i) {
    if (std::abs(rows[static_cast<std::size_t>(i)] - 1.0) > kRowTol) {
      os.precision(12);
      os << "row " << (i + 1) << " sums to " << rows[static_cast<std::size_t>(i)] << " instead of 1";
      return {false, os.str()};
    }
  }
  return {};
}

void require_valid(const FractionalPartition& fp) {
  const auto rep = validate(fp);
  if (!rep.ok) throw InputError("invalid fractional partition: " + rep.message);
}

void check_partition(const Partition& pi) {
  if (pi.k < 1 || pi.k > kMaxK) throw InputError("partition: k out of range");
  Subset seen = 0;
  for (auto b : pi.blocks) {
    if (b == 0) throw InputError("partition: empty block");
    if (b & ~full_set(pi.k)) throw InputError("partition: block member outside [k]");
    if (b & seen) throw InputError("partition: blocks overlap");
    seen |= b;
  }
  if (seen != full_set(pi.k)) throw InputError("partition: blocks do not cover [k]");
}

Partition parse_partition(int k, const std::string& text) {
  Partition pi{k, {}};
  std::stringstream blocks(text);
  std::string block;
  while (std::getline(blocks, block, '|')) {
    Subset mask = 0;
    std::stringstream members(block);
    std::string m;
    while (std::getline(members, m, ',')) {
      int idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoi(m, &used);
        if (used != m.size()) throw std::invalid_argument(m);
      } catch (const std::exception&) {
        throw InputError("partition: cannot parse member '" + m + "'");
      }
      if (idx < 1 || idx > k) throw InputError("partition: member " + m + " outside [k]");
      mask |= Subset{1} << (idx - 1);
    }
    pi.blocks.push_back(mask);
  }
  check_partition(pi);
  return pi;
}

std::string format_subset(Subset b, int k) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < k; ++i) {
    if (!(b & (Subset{1} << i))) continue;
    if (!first) s += ",";
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

std::string format_partition(const Partition& pi) {
  std::string s;
  for (std::size_t j = 0; j < pi.blocks.size(); ++j) {
    if (j) s += "|";
    bool first = true;
    for (int i = 0; i < pi.k; ++i) {
      if (!(pi.blocks[j] & (Subset{1} << i))) continue;
      if (!first) s += ",";
      s += std::to_string(i + 1);
      first = false;
    }
  }
  return s;
}

FractionalPartition preset_uniform_km1(int k) {
  FractionalPartition fp(k);
  for (Subset b = 1; b < full_set(k); ++b)
    if (std::popcount(b) == k - 1) fp.set(b, 1.0 / (k - 1));
  return fp;
}

FractionalPartition preset_partition(const Partition& pi) {
  check_partition(pi);
  if (pi.r() < 2) throw InputError("partition preset needs at least two blocks");
  FractionalPartition fp(pi.k);
  for (auto block : pi.blocks) fp.set(full_set(pi.k) & ~block, 1.0 / (pi.r() - 1));
  return fp;
}

// ------------------------------------------------------------ vertex search

namespace {

// Solves the k x k system formed by the incidence columns `cols` against the
// all-ones right-hand side. Returns false when the basis is singular.
bool solve_basis(int k, const std::vector<Subset>& cols, std::vector<double>& x) {
  const auto n = static_cast<std::size_t>(k);
  std::vector<double> m(n * (n + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i * (n + 1) + j] = (cols[j] >> i) & 1U ? 1.0 : 0.0;
    m[i * (n + 1) + n] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * (n + 1) + c]) > std::abs(m[piv * (n + 1) + c])) piv = r;
    if (std::abs(m[piv * (n + 1) + c]) < 1e-12) return false;
    if (piv != c)
      for (std::size_t j = 0; j <= n; ++j) std::swap(m[c * (n + 1) + j], m[piv * (n + 1) + j]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r * (n + 1) + c] / m[c * (n + 1) + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j <= n; ++j) m[r * (n + 1) + j] -= f * m[c * (n + 1) + j];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i * (n + 1) + n] / m[i * (n + 1) + i];
  return true;
}

bool same_point(const FractionalPartition& a, const FractionalPartition& b) {
  for (std::size_t i = 0; i < a.table().size(); ++i)
    if (std::abs(a.table()[i] - b.table()[i]) > kRowTol) return false;
  return true;
}

}  // namespace

std::vector<FractionalPartition> vertices(int k) {
  check_k(k, kMaxVertexK, "vertices");
  const auto n = static_cast<int>(full_set(k)) - 1;  // number of proper nonempty subsets
  std::vector<FractionalPartition> out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  std::vector<Subset> cols(static_cast<std::size_t>(k));
  std::vector<double> x;
  while (true) {
    for (int i = 0; i < k; ++i) cols[static_cast<std::size_t>(i)] = static_cast<Subset>(pick[static_cast<std::size_t>(i)] + 1);
    if (solve_basis(k, cols, x) &&
        std::all_of(x.begin(), x.end(), [](double v) { return v >= -kZeroWeight; })) {
      FractionalPartition fp(k);
      for (int i = 0; i < k; ++i) {
        const double v = x[static_cast<std::size_t>(i)];
        fp.set(cols[static_cast<std::size_t>(i)], std::abs(v) <= kZeroWeight ? 0.0 : v);
      }
      if (std::none_of(out.begin(), out.end(), [&](const auto& v) { return same_point(v, fp); }))
        out.push_back(std::move(fp));
    }
    // next combination of k columns out of n
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// ------------------------------------------------------------------ simplex

LinearOptimum optimize_linear_simplex(int k, const std::vector<double>& objective, Sense sense) {
  check_k(k, kMaxLinearK, "optimize_linear");
  if (objective.size() != (std::size_t{1} << k))
    throw InputError("optimize_linear: objective must have 2^k entries");

  // Standard form: min c.x  s.t.  A x = 1, x >= 0, one column per proper
  // nonempty subset in ascending mask order. The singleton columns form an
  // identity basis with x = 1, so no phase one is needed.
  const auto rows = static_cast<std::size_t>(k);
  const auto cols = static_cast<std::size_t>(full_set(k) - 1);
  const double sign = sense == Sense::kMin ? 1.0 : -1.0;
  auto mask_of = [](std::size_t col) { return static_cast<Subset>(col + 1); };

  std::vector<double> tab(rows * (cols + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * (cols + 1) + c]; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) at(r, c) = (mask_of(c) >> r) & 1U ? 1.0 : 0.0;
    at(r, cols) = 1.0;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = (std::size_t{1} << r) - 1;

  std::vector<double> cost(cols);
  for (std::size_t c = 0; c < cols; ++c) cost[c] = sign * objective[mask_of(c)];

  constexpr double eps = 1e-12;
  const std::size_t max_pivots = 100000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_pivots) throw NumericalError("optimize_linear: simplex pivot limit reached");
    // Bland: entering column is the lowest index with negative reduced cost.
    std::size_t enter = cols;
    for (std::size_t c = 0; c < cols; ++c) {
      double reduced = cost[c];
      for (std::size_t r = 0; r < rows; ++r) reduced -= cost[basis[r]] * at(r, c);
      if (reduced < -eps) {
        enter = c;
        break;
      }
    }
    if (enter == cols) break;
    // Ratio test, ties to the lowest basic column index.
    std::size_t leave = rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = at(r, enter);
      if (a <= eps) continue;
      const double ratio = at(r, cols) / a;
      if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave < rows && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == rows) throw NumericalError("optimize_linear: unbounded direction in a bounded polytope");
    const double piv = at(leave, enter);
    for (std::size_t c = 0; c <= cols; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }

  FractionalPartition fp(k);
  for (std::size_t r = 0; r < rows; ++r) {
    const double v = at(r, cols);
    fp.set(mask_of(basis[r]), std::abs(v) <= kZeroWeight ? 0.0 : v);
  }
  const double value = objective_value(fp, objective);
  return {std::move(fp), value};
}

LinearOptimum optimize_linear(int k, const std::vector<double>& objective, Sense sense) {
  check_k(k, kMaxLinearK, "optimize_linear");
  if (objective.size() != (std::size_t{1} << k))
    throw InputError("optimize_linear: objective must have 2^k entries");
  if (k > kMaxVertexK) return optimize_linear_simplex(k, objective, sense);

  auto verts = vertices(k);
  std::size_t best = 0;
  double best_val = objective_value(verts[0], objective);
  for (std::size_t i = 1; i < verts.size(); ++i) {
    const double v = objective_value(verts[i], objective);
    const bool better = sense == Sense::kMin ? v < best_val - kZeroWeight : v > best_val + kZeroWeight;
    if (better) {
      best = i;
      best_val = v;
    }
  }
  return {std::move(verts[best]), best_val};
}

bool admissible_for_keyset(const FractionalPartition& fp, int r) {
  if (r < 1 || r > fp.k()) throw InputError("admissible_for_keyset: r outside [1, k]");
  const Subset keyset = full_set(r);
  for (Subset b = 1; b < full_set(fp.k()); ++b)
    if (contains(b, keyset) && std::abs(fp.weight(b)) > kZeroWeight) return false;
  return true;
}

}  // namespace wimwc::fracpart
