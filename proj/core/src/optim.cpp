#include "wimwc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wimwc/errors.hpp"

namespace wimwc::optim {

void project_to_simplex(std::span<double> v) {
  const std::size_t n = v.size();
  if (n == 0) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += v[order[j]];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (v[order[j]] - t > 0.0) theta = t;
  }
  double total = 0.0;
  for (auto& x : v) {
    x = std::max(x - theta, 0.0);
    total += x;
  }
  // Renormalize away accumulated round-off.
  if (total > 0.0)
    for (auto& x : v) x /= total;
  else
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(n));
}

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix(s);
  s = h ^ (a * 0xd1b54a32d192ed03ULL);
  h = splitmix(s);
  s = h ^ (b * 0x8cb92ba72f3d8dd7ULL);
  return splitmix(s);
}

std::uint64_t Rng::next() { return splitmix(state_); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

std::vector<double> Rng::simplex_point(std::size_t dim) {
  std::vector<double> p(dim);
  double s = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - uniform());
    s += x;
  }
  if (s <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(dim));
    return p;
  }
  for (auto& x : p) x /= s;
  return p;
}

std::size_t simplex_grid_size(std::size_t dim, int res) {
  if (dim == 0) return 0;
  if (res < 2) throw InputError("grid resolution must be at least 2");
  // C(res - 2 + dim, dim - 1), saturating.
  const std::size_t m = static_cast<std::size_t>(res - 1);
  double c = 1.0;
  for (std::size_t i = 1; i < dim; ++i) {
    c = c * static_cast<double>(m + i) / static_cast<double>(i);
    if (c > 1e15) return static_cast<std::size_t>(1e15);
  }
  return static_cast<std::size_t>(std::llround(c));
}

namespace {

void grid_rec(std::vector<int>& c, std::vector<double>& p, std::size_t pos, int remaining, int m,
              const std::function<void(std::span<const double>)>& fn) {
  if (pos + 1 == c.size()) {
    c[pos] = remaining;
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(m);
    fn(p);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    c[pos] = v;
    grid_rec(c, p, pos + 1, remaining - v, m, fn);
  }
}

}  // namespace

void for_each_simplex_grid_point(std::size_t dim, int res, const std::function<void(std::span<const double>)>& fn) {
  if (dim == 0) return;
  if (res < 2) throw InputError("grid resolution must be at least 2");
  std::vector<int> c(dim, 0);
  std::vector<double> p(dim, 0.0);
  grid_rec(c, p, 0, res - 1, res - 1, fn);
}

// ------------------------------------------------------------- EntropyBasis

EntropyBasis::EntropyBasis(std::vector<int> cards) : cards_(std::move(cards)), cells_(1) {
  if (cards_.size() > 32) throw InputError("entropy basis supports at most 32 axes");
  for (int c : cards_) {
    if (c < 1) throw InputError("entropy basis: cardinality < 1");
    if (cells_ > kMaxOptimCells / static_cast<std::size_t>(c)) throw SizeError("optimizer tensor exceeds 2^22 cells");
    cells_ *= static_cast<std::size_t>(c);
  }
}

std::size_t EntropyBasis::term(std::uint32_t mask) {
  for (std::size_t t = 0; t < masks_.size(); ++t)
    if (masks_[t] == mask) return t;
  const std::size_t n_axes = cards_.size();
  if (n_axes < 32 && (mask >> n_axes) != 0) throw InputError("entropy basis: mask refers to a missing axis");
  std::vector<std::size_t> stride(n_axes, 0);
  std::size_t size = 1;
  for (std::size_t i = n_axes; i-- > 0;) {
    if (mask & (std::uint32_t{1} << i)) {
      stride[i] = size;
      size *= static_cast<std::size_t>(cards_[i]);
    }
  }
  std::vector<std::uint32_t> idx(cells_);
  std::vector<int> ctr(n_axes, 0);
  std::size_t m = 0;
  for (std::size_t cell = 0; cell < cells_; ++cell) {
    idx[cell] = static_cast<std::uint32_t>(m);
    for (std::size_t ax = n_axes; ax-- > 0;) {
      if (++ctr[ax] < cards_[ax]) {
        m += stride[ax];
        break;
      }
      m -= stride[ax] * static_cast<std::size_t>(cards_[ax] - 1);
      ctr[ax] = 0;
    }
  }
  masks_.push_back(mask);
  index_.push_back(std::move(idx));
  marg_size_.push_back(size);
  return masks_.size() - 1;
}

void EntropyBasis::evaluate(std::span<const double> joint, Eval& out) const {
  out.h.assign(masks_.size(), 0.0);
  out.marg.resize(masks_.size());
  for (std::size_t t = 0; t < masks_.size(); ++t) {
    auto& m = out.marg[t];
    m.assign(marg_size_[t], 0.0);
    const auto& idx = index_[t];
    for (std::size_t cell = 0; cell < cells_; ++cell) m[idx[cell]] += joint[cell];
    double h = 0.0;
    for (double p : m)
      if (p > 0.0) h -= p * std::log2(p);
    out.h[t] = h;
  }
}

void EntropyBasis::cell_gradient(const Eval& ev, std::span<const double> coef, std::span<double> out) const {
  constexpr double kInvLn2 = 1.4426950408889634;
  // log2 of a vanishing marginal is replaced by this floor; the derivative of
  // -p log p diverges at 0 and the optimizers only need a large finite push.
  constexpr double kLogFloor = -1000.0;
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> dlog;
  for (std::size_t t = 0; t < masks_.size(); ++t) {
    const double c = coef[t];
    if (c == 0.0) continue;
    const auto& m = ev.marg[t];
    dlog.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      dlog[i] = -c * ((m[i] > 0.0 ? std::max(std::log2(m[i]), kLogFloor) : kLogFloor) + kInvLn2);
    const auto& idx = index_[t];
    for (std::size_t cell = 0; cell < cells_; ++cell) out[cell] += dlog[idx[cell]];
  }
}

// ------------------------------------------------------------- EntropyExpr

void EntropyExpr::add_entropy(EntropyBasis& basis, std::uint32_t mask, double coef) {
  if (mask == 0 || coef == 0.0) return;
  const std::size_t t = basis.term(mask);
  for (auto& [id, c] : terms_)
    if (id == t) {
      c += coef;
      return;
    }
  terms_.emplace_back(t, coef);
}

void EntropyExpr::add_cmi(EntropyBasis& basis, std::uint32_t a, std::uint32_t b, std::uint32_t c, double coef) {
  add_entropy(basis, a | c, coef);
  add_entropy(basis, b | c, coef);
  add_entropy(basis, a | b | c, -coef);
  add_entropy(basis, c, -coef);
}

void EntropyExpr::add(const EntropyExpr& other, double coef) {
  for (const auto& [id, c] : other.terms_) {
    bool found = false;
    for (auto& [mine, mc] : terms_)
      if (mine == id) {
        mc += coef * c;
        found = true;
        break;
      }
    if (!found) terms_.emplace_back(id, coef * c);
  }
}

double EntropyExpr::eval(const EntropyBasis::Eval& ev) const {
  double v = 0.0;
  for (const auto& [id, c] : terms_) v += c * ev.h[id];
  return v;
}

std::vector<double> EntropyExpr::dense(std::size_t term_count) const {
  std::vector<double> out(term_count, 0.0);
  for (const auto& [id, c] : terms_) out[id] += c;
  return out;
}

}  // namespace wimwc::optim
