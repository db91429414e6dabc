#include "wimwc/macregion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "wimwc/errors.hpp"
#include "wimwc/optim.hpp"

namespace wimwc::macregion {

namespace {

const std::vector<std::string> kPVars = {"T1", "T2", "X1", "X2"};

void check_p(const JointDist& p, const GenFeedbackMAC& mac) {
  if (p.vars().size() != 4) throw InputError("MAC input law must be over T1, T2, X1, X2");
  for (std::size_t i = 0; i < 4; ++i)
    if (p.vars()[i].name != kPVars[i]) throw InputError("MAC input law must be over T1, T2, X1, X2 in that order");
  if (p.vars()[2].card != mac.card_x1() || p.vars()[3].card != mac.card_x2())
    throw InputError("MAC input law: X alphabets do not match the channel");
  if (p.vars()[0].card > mac.max_card_t1()) throw InputError("|T1| exceeds the cap of 5");
  if (p.vars()[1].card > mac.max_card_t2()) throw InputError("|T2| exceeds the cap |X1||X2| + 3");
}

}  // namespace

GenFeedbackMAC::GenFeedbackMAC(Channel channel) : channel_(std::move(channel)) {
  const auto& in = channel_.in_vars();
  const auto& out = channel_.out_vars();
  if (in.size() != 2 || in[0].name != "X1" || in[1].name != "X2")
    throw InputError("MAC channel inputs must be X1, X2");
  if (out.size() != 3 || out[0].name != "Y" || out[1].name != "YF1" || out[2].name != "YF2")
    throw InputError("MAC channel outputs must be Y, YF1, YF2");
}

RateTerms rate_terms(const JointDist& p, const GenFeedbackMAC& mac) {
  check_p(p, mac);
  const JointDist j = push_through(p, mac.channel());
  RateTerms r;
  r.r1 = cond_mutual_info(j, {"X1"}, {"Y", "YF2"}, {"X2", "T1", "T2"});
  r.r2 = cond_mutual_info(j, {"X2"}, {"Y", "YF1"}, {"X1", "T1", "T2"});
  r.sum_full = cond_mutual_info(j, {"X1", "X2"}, {"Y", "YF1", "YF2"}, {"T1", "T2"});
  r.sum_y = cond_mutual_info(j, {"X1", "X2"}, {"Y"}, {"T1"});
  r.slack_6a = cond_mutual_info(j, {"X1"}, {"X2"}, {"Y", "YF1", "YF2", "T1", "T2"}) -
               cond_mutual_info(j, {"X1"}, {"X2"}, {"T1", "T2"});
  r.slack_6b = cond_mutual_info(j, {"X1", "YF1"}, {"X2", "YF2"}, {"T1", "Y"}) -
               cond_mutual_info(j, {"X1"}, {"X2"}, {"T1"});
  return r;
}

ConstraintReport constraints_ok(const JointDist& p, const GenFeedbackMAC& mac) {
  const auto r = rate_terms(p, mac);
  return {r.slack_6a >= -kSlackTol && r.slack_6b >= -kSlackTol, r.slack_6a, r.slack_6b};
}

// ------------------------------------------------------------------ model

namespace {

// Rate and constraint functionals on flat p(t1, t2, x1, x2).
class MacModel {
 public:
  enum Fn { kR1, kR2, kSumFull, kSumY, kSlack6a, kSlack6b, kFnCount };

  MacModel(const GenFeedbackMAC& mac, int t1, int t2)
      : w_(mac.channel().probs()),
        nt_(static_cast<std::size_t>(t1) * static_cast<std::size_t>(t2)),
        nx_(mac.channel().in_size()),
        no_(mac.channel().out_size()),
        t1_(t1),
        t2_(t2),
        basis_(cards(mac, t1, t2)) {
    auto bit = [](int b) { return std::uint32_t{1} << b; };
    const auto T1 = bit(0), T2 = bit(1), X1 = bit(2), X2 = bit(3), Y = bit(4), F1 = bit(5), F2 = bit(6);
    fns_.resize(kFnCount);
    fns_[kR1].add_cmi(basis_, X1, Y | F2, X2 | T1 | T2, 1.0);
    fns_[kR2].add_cmi(basis_, X2, Y | F1, X1 | T1 | T2, 1.0);
    fns_[kSumFull].add_cmi(basis_, X1 | X2, Y | F1 | F2, T1 | T2, 1.0);
    fns_[kSumY].add_cmi(basis_, X1 | X2, Y, T1, 1.0);
    fns_[kSlack6a].add_cmi(basis_, X1, X2, Y | F1 | F2 | T1 | T2, 1.0);
    fns_[kSlack6a].add_cmi(basis_, X1, X2, T1 | T2, -1.0);
    fns_[kSlack6b].add_cmi(basis_, X1 | F1, X2 | F2, T1 | Y, 1.0);
    fns_[kSlack6b].add_cmi(basis_, X1, X2, T1, -1.0);
    for (auto& f : fns_) dense_.push_back(f.dense(basis_.term_count()));
  }

  std::size_t size() const { return nt_ * nx_; }

  // Evaluates all functionals; keeps the evaluation for gradient().
  std::vector<double> eval(std::span<const double> p) {
    joint_.assign(size() * no_, 0.0);
    for (std::size_t tx = 0; tx < size(); ++tx) {
      if (p[tx] == 0.0) continue;
      const std::size_t x = tx % nx_;
      for (std::size_t o = 0; o < no_; ++o) joint_[tx * no_ + o] = p[tx] * w_[x * no_ + o];
    }
    basis_.evaluate(joint_, ev_);
    std::vector<double> out(kFnCount);
    for (int f = 0; f < kFnCount; ++f) out[static_cast<std::size_t>(f)] = fns_[static_cast<std::size_t>(f)].eval(ev_);
    return out;
  }

  // Gradient w.r.t. p of sum_f weights[f] * fn_f at the last evaluated point.
  std::vector<double> gradient(std::span<const double> weights) {
    std::vector<double> coef(basis_.term_count(), 0.0);
    for (int f = 0; f < kFnCount; ++f) {
      const double wf = weights[static_cast<std::size_t>(f)];
      if (wf == 0.0) continue;
      for (std::size_t t = 0; t < coef.size(); ++t) coef[t] += wf * dense_[static_cast<std::size_t>(f)][t];
    }
    std::vector<double> g(joint_.size());
    basis_.cell_gradient(ev_, coef, g);
    std::vector<double> out(size(), 0.0);
    for (std::size_t tx = 0; tx < size(); ++tx) {
      const std::size_t x = tx % nx_;
      double s = 0.0;
      for (std::size_t o = 0; o < no_; ++o) s += w_[x * no_ + o] * g[tx * no_ + o];
      out[tx] = s;
    }
    return out;
  }

  JointDist to_joint(std::span<const double> p, const GenFeedbackMAC& mac) const {
    std::vector<VarSpec> vars = {{"T1", t1_}, {"T2", t2_}, mac.channel().in_vars()[0], mac.channel().in_vars()[1]};
    return JointDist(std::move(vars), std::vector<double>(p.begin(), p.end()));
  }

 private:
  static std::vector<int> cards(const GenFeedbackMAC& mac, int t1, int t2) {
    std::vector<int> c = {t1, t2, mac.card_x1(), mac.card_x2()};
    for (const auto& v : mac.channel().out_vars()) c.push_back(v.card);
    return c;
  }

  std::vector<double> w_;
  std::size_t nt_, nx_, no_;
  int t1_, t2_;
  optim::EntropyBasis basis_;
  std::vector<optim::EntropyExpr> fns_;
  std::vector<std::vector<double>> dense_;
  std::vector<double> joint_;
  optim::EntropyBasis::Eval ev_;
};

// min over pieces of linear combinations of the four rate functionals.
using Piece = std::array<double, 4>;  // coefficients on r1, r2, sum_full, sum_y

std::vector<Piece> sum_rate_pieces() {
  return {Piece{1, 1, 0, 0}, Piece{0, 0, 1, 0}, Piece{0, 0, 0, 1}};
}

// max mu R1 + (1 - mu) R2 over the pentagon R1 <= a, R2 <= b, R1 + R2 <= s,
// written as the minimum over the dual vertices, with s = min(sum_full, sum_y).
std::vector<Piece> direction_pieces(double mu) {
  const double nu = 1.0 - mu;
  if (mu >= 0.5)
    return {Piece{mu, nu, 0, 0}, Piece{0, 0, mu, 0}, Piece{0, 0, 0, mu}, Piece{2 * mu - 1, 0, nu, 0},
            Piece{2 * mu - 1, 0, 0, nu}};
  return {Piece{mu, nu, 0, 0}, Piece{0, 0, nu, 0}, Piece{0, 0, 0, nu}, Piece{0, 1 - 2 * mu, mu, 0},
          Piece{0, 1 - 2 * mu, 0, mu}};
}

struct Scored {
  double value;
  std::size_t active;
};

Scored score(const std::vector<Piece>& pieces, const std::vector<double>& f) {
  Scored s{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < 4; ++j) v += pieces[i][j] * f[j];
    if (v < s.value) s = {v, i};
  }
  return s;
}

bool feasible(const std::vector<double>& f, bool drop_6b) {
  return f[MacModel::kSlack6a] >= -kSlackTol && (drop_6b || f[MacModel::kSlack6b] >= -kSlackTol);
}

class Searcher {
 public:
  Searcher(const GenFeedbackMAC& mac, const MacConfig& cfg, int t1, int t2)
      : mac_(mac), cfg_(cfg), model_(mac, t1, t2), t1_(t1), t2_(t2) {}

  std::size_t size() const { return model_.size(); }

  // T1 = T2 = 0 with independent uniform inputs; always feasible.
  std::vector<double> anchor() const {
    std::vector<double> p(size(), 0.0);
    const auto nx = static_cast<std::size_t>(mac_.card_x1() * mac_.card_x2());
    for (std::size_t x = 0; x < nx; ++x) p[x] = 1.0 / static_cast<double>(nx);
    return p;
  }

  // Penalized projected ascent followed by a feasibility repair.
  std::vector<double> climb(std::vector<double> p, const std::vector<Piece>& pieces) {
    const auto& o = cfg_.opt;
    for (double rho : {1e1, 1e2, 1e3, 1e4, 1e5}) {
      double step = o.step_init;
      double cur = penalized(p, pieces, rho);
      for (int it = 0; it < o.max_iters; ++it) {
        const auto g = penalized_gradient(p, pieces, rho);
        std::vector<double> cand(p.size());
        bool moved = false;
        double next = cur;
        for (int tries = 0; tries < 40; ++tries) {
          for (std::size_t i = 0; i < p.size(); ++i) cand[i] = p[i] + step * g[i];
          optim::project_to_simplex(cand);
          next = penalized(cand, pieces, rho);
          if (next > cur) {
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
        p = cand;
        step = std::min(step * 2.0, 1e6);
        const bool small = next - cur <= o.tol;
        cur = next;
        if (small) break;
      }
    }
    return repair(std::move(p));
  }

  // Mixes toward the anchor until both constraints hold.
  std::vector<double> repair(std::vector<double> p) {
    if (feasible(model_.eval(p), cfg_.drop_6b)) return p;
    const auto a = anchor();
    std::vector<double> q(p.size());
    for (int e = 30; e >= 0; --e) {
      const double theta = std::ldexp(1.0, -e);
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = (1.0 - theta) * p[i] + theta * a[i];
      if (feasible(model_.eval(q), cfg_.drop_6b)) return q;
    }
    return a;
  }

  std::vector<double> evaluate(std::span<const double> p) { return model_.eval(p); }

  JointDist to_joint(std::span<const double> p) const { return model_.to_joint(p, mac_); }

  // Best feasible point for the given pieces over restarts (and the grid when configured).
  std::pair<double, std::vector<double>> maximize(const std::vector<Piece>& pieces, std::uint64_t stream) {
    double best_v = -std::numeric_limits<double>::infinity();
    std::vector<double> best;
    auto offer = [&](std::vector<double> p) {
      const auto f = model_.eval(p);
      if (!feasible(f, cfg_.drop_6b)) return;
      const double v = score(pieces, f).value;
      if (v > best_v) {
        best_v = v;
        best = std::move(p);
      }
    };
    offer(anchor());
    if (cfg_.opt.grid_res) {
      const auto nx = static_cast<std::size_t>(mac_.card_x1() * mac_.card_x2());
      if (optim::simplex_grid_size(nx, *cfg_.opt.grid_res) > 2'000'000) throw SizeError("MAC grid too large");
      optim::for_each_simplex_grid_point(nx, *cfg_.opt.grid_res, [&](std::span<const double> px) {
        std::vector<double> p(size(), 0.0);
        std::copy(px.begin(), px.end(), p.begin());
        offer(std::move(p));
      });
    }
    for (int rs = 0; rs < cfg_.opt.restarts; ++rs) {
      std::vector<double> start;
      if (rs == 0) {
        start.assign(size(), 1.0 / static_cast<double>(size()));
      } else {
        optim::Rng rng(optim::derive_seed(cfg_.opt.master_seed, stream, static_cast<std::uint64_t>(rs)));
        start = rng.simplex_point(size());
      }
      offer(climb(std::move(start), pieces));
    }
    return {best_v, std::move(best)};
  }

 private:
  double penalized(std::span<const double> p, const std::vector<Piece>& pieces, double rho) {
    const auto f = model_.eval(p);
    double v = score(pieces, f).value;
    const double va = std::min(0.0, f[MacModel::kSlack6a]);
    v -= rho * va * va;
    if (!cfg_.drop_6b) {
      const double vb = std::min(0.0, f[MacModel::kSlack6b]);
      v -= rho * vb * vb;
    }
    return v;
  }

  std::vector<double> penalized_gradient(std::span<const double> p, const std::vector<Piece>& pieces, double rho) {
    const auto f = model_.eval(p);
    const auto s = score(pieces, f);
    std::vector<double> w(MacModel::kFnCount, 0.0);
    for (std::size_t j = 0; j < 4; ++j) w[j] = pieces[s.active][j];
    const double va = std::min(0.0, f[MacModel::kSlack6a]);
    w[MacModel::kSlack6a] = -2.0 * rho * va;
    if (!cfg_.drop_6b) {
      const double vb = std::min(0.0, f[MacModel::kSlack6b]);
      w[MacModel::kSlack6b] = -2.0 * rho * vb;
    }
    return model_.gradient(w);
  }

  const GenFeedbackMAC& mac_;
  const MacConfig& cfg_;
  MacModel model_;
  int t1_, t2_;
};

std::pair<int, int> aux_cards(const GenFeedbackMAC& mac, const MacConfig& cfg) {
  const int t1 = cfg.card_t1.value_or(mac.max_card_t1());
  const int t2 = cfg.card_t2.value_or(mac.max_card_t2());
  if (t1 < 1 || t1 > mac.max_card_t1()) throw InputError("|T1| must lie in [1, 5]");
  if (t2 < 1 || t2 > mac.max_card_t2()) throw InputError("|T2| must lie in [1, |X1||X2| + 3]");
  return {t1, t2};
}

constexpr std::uint64_t kSumRateStream = 1000;

RateTerms to_terms(const std::vector<double>& f) {
  return {f[MacModel::kR1], f[MacModel::kR2], f[MacModel::kSumFull], f[MacModel::kSumY], f[MacModel::kSlack6a],
          f[MacModel::kSlack6b]};
}

void pentagon(const RateTerms& r, std::vector<std::pair<double, double>>& pts) {
  const double a = std::max(0.0, r.r1), b = std::max(0.0, r.r2);
  const double s = std::max(0.0, std::min(r.sum_full, r.sum_y));
  const double ea = std::min(a, s), eb = std::min(b, s);
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(ea, 0.0);
  pts.emplace_back(0.0, eb);
  pts.emplace_back(ea, std::min(b, s - ea));
  pts.emplace_back(std::min(a, s - eb), eb);
}

}  // namespace

SumRateResult outer_sum_rate(const GenFeedbackMAC& mac, const MacConfig& cfg) {
  keybound::check_config(cfg.opt);
  const auto [t1, t2] = aux_cards(mac, cfg);
  Searcher s(mac, cfg, t1, t2);
  auto [v, p] = s.maximize(sum_rate_pieces(), kSumRateStream);
  const auto terms = to_terms(s.evaluate(p));
  return SumRateResult{v, s.to_joint(p), terms, false};
}

std::vector<std::pair<double, double>> downward_hull(const std::vector<std::pair<double, double>>& points) {
  double max_x = 0.0, max_y = 0.0;
  std::map<double, double> top;  // x -> highest y
  for (auto [x, y] : points) {
    x = std::max(0.0, x);
    y = std::max(0.0, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
    auto it = top.find(x);
    if (it == top.end() || y > it->second) top[x] = y;
  }
  top[0.0] = std::max(top[0.0], max_y);
  std::vector<std::pair<double, double>> chain;
  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  for (const auto& pt : top) {
    while (chain.size() >= 2 && cross(chain[chain.size() - 2], chain.back(), pt) >= 0.0) chain.pop_back();
    chain.push_back(pt);
  }
  std::vector<std::pair<double, double>> out{{0.0, 0.0}};
  for (const auto& pt : chain)
    if (pt != out.back()) out.push_back(pt);
  if (out.back().second > 0.0 && max_x > 0.0) out.emplace_back(max_x, 0.0);
  return out;
}

OuterRegion outer_region(const GenFeedbackMAC& mac, const MacConfig& cfg, std::span<const JointDist> warm_start) {
  keybound::check_config(cfg.opt);
  const auto [t1, t2] = aux_cards(mac, cfg);
  Searcher s(mac, cfg, t1, t2);

  std::vector<std::vector<double>> pool;
  for (const auto& w : warm_start) {
    check_p(w, mac);
    if (w.vars()[0].card != t1 || w.vars()[1].card != t2) {
      // Re-embed into the configured alphabet sizes.
      if (w.vars()[0].card > t1 || w.vars()[1].card > t2) continue;
      std::vector<double> p(s.size(), 0.0);
      const auto nx = static_cast<std::size_t>(mac.card_x1() * mac.card_x2());
      for (std::size_t cell = 0; cell < w.size(); ++cell) {
        const std::size_t x = cell % nx;
        const std::size_t t = cell / nx;
        const std::size_t a = t / static_cast<std::size_t>(w.vars()[1].card);
        const std::size_t b = t % static_cast<std::size_t>(w.vars()[1].card);
        p[(a * static_cast<std::size_t>(t2) + b) * nx + x] += w.probs()[cell];
      }
      pool.push_back(std::move(p));
    } else {
      pool.push_back(w.probs());
    }
  }
  {
    auto [v, p] = s.maximize(sum_rate_pieces(), kSumRateStream);
    pool.push_back(std::move(p));
  }
  for (int d = 0; d < kDirections; ++d) {
    const double mu = static_cast<double>(d) / (kDirections - 1);
    auto [v, p] = s.maximize(direction_pieces(mu), static_cast<std::uint64_t>(d));
    pool.push_back(std::move(p));
  }

  OuterRegion reg;
  std::vector<std::pair<double, double>> pts;
  for (auto& p : pool) {
    const auto f = s.evaluate(p);
    if (!feasible(f, cfg.drop_6b)) continue;
    pentagon(to_terms(f), pts);
    reg.witnesses.push_back(s.to_joint(p));
  }
  reg.vertices = downward_hull(pts);
  for (const auto& [x, y] : reg.vertices) reg.sum_rate_max = std::max(reg.sum_rate_max, x + y);
  reg.certified = false;
  return reg;
}

bool region_contains(const OuterRegion& region, double r1, double r2, double tol) {
  const auto& v = region.vertices;
  if (r1 < -tol || r2 < -tol) return false;
  double max_x = 0.0, max_y = 0.0;
  for (const auto& [x, y] : v) {
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  if (r1 > max_x + tol || r2 > max_y + tol) return false;
  // Frontier edges run left to right between consecutive vertices after (0,0).
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const auto [ax, ay] = v[i];
    const auto [bx, by] = v[i + 1];
    const double ex = bx - ax, ey = by - ay;
    const double len = std::hypot(ex, ey);
    if (len == 0.0) continue;
    const double c = ex * (r2 - ay) - ey * (r1 - ax);
    if (c > tol * len) return false;
  }
  return true;
}

}  // namespace wimwc::macregion
