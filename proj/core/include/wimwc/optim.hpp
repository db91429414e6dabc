#pragma once

// Building blocks for maximizing entropy expressions over probability
// simplices: Euclidean simplex projection, counter-based seeding, simplex
// grids, and linear combinations of marginal entropies with their gradient
// with respect to every cell of the joint tensor.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wimwc::optim {

/// Largest joint tensor the optimizers will build.
inline constexpr std::size_t kMaxOptimCells = std::size_t{1} << 22;

/// Euclidean projection onto {v >= 0, sum v = 1}; ties broken by index.
void project_to_simplex(std::span<double> v);

/// splitmix64 mixing of (master, a, b); used to derive per-restart streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Small deterministic generator (splitmix64 stream) with portable outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  /// Flat Dirichlet sample of the given dimension.
  std::vector<double> simplex_point(std::size_t dim);

 private:
  std::uint64_t state_;
};

/// Number of points with coordinates c_i / (res - 1), sum c_i = res - 1.
std::size_t simplex_grid_size(std::size_t dim, int res);

/// Visits every grid point in lexicographic order of the integer coordinates.
void for_each_simplex_grid_point(std::size_t dim, int res, const std::function<void(std::span<const double>)>& fn);

/// Entropies of registered marginals of a dense joint tensor, plus the
/// per-cell gradient of any linear combination of them.
class EntropyBasis {
 public:
  explicit EntropyBasis(std::vector<int> cards);

  /// Registers H(axes in mask) and returns its term id; duplicates share an id.
  std::size_t term(std::uint32_t axis_mask);
  std::size_t term_count() const noexcept { return masks_.size(); }
  std::size_t cells() const noexcept { return cells_; }

  struct Eval {
    std::vector<double> h;                  // per term, in bits
    std::vector<std::vector<double>> marg;  // per term marginal
  };
  void evaluate(std::span<const double> joint, Eval& out) const;

  /// out[cell] = sum_t coef[t] * d H_t / d joint[cell], treating the joint as
  /// free (unnormalized) coordinates.
  void cell_gradient(const Eval& ev, std::span<const double> coef, std::span<double> out) const;

 private:
  std::vector<int> cards_;
  std::size_t cells_;
  std::vector<std::uint32_t> masks_;
  std::vector<std::vector<std::uint32_t>> index_;  // per term: cell -> marginal index
  std::vector<std::size_t> marg_size_;
};

/// Sparse linear combination of entropy terms.
class EntropyExpr {
 public:
  void add_entropy(EntropyBasis& basis, std::uint32_t mask, double coef);
  /// coef * I(A; B | C) = coef * [H(AC) + H(BC) - H(ABC) - H(C)].
  void add_cmi(EntropyBasis& basis, std::uint32_t a, std::uint32_t b, std::uint32_t c, double coef);
  void add(const EntropyExpr& other, double coef);

  double eval(const EntropyBasis::Eval& ev) const;
  /// Dense coefficient vector over all registered terms.
  std::vector<double> dense(std::size_t term_count) const;

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
};

}  // namespace wimwc::optim
