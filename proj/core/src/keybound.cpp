#include "wimwc/keybound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wimwc/dbbound.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/lambda_mi.hpp"
#include "wimwc/optim.hpp"

namespace wimwc::keybound {

using fracpart::FractionalPartition;

namespace {

constexpr std::size_t kMaxGridPoints = 2'000'000;

void check_lambda(const FractionalPartition& fp, int k, int r) {
  if (fp.k() != k) throw InputError("fractional partition is over a different number of terminals");
  fracpart::require_valid(fp);
  if (!fracpart::admissible_for_keyset(fp, r)) {
    std::ostringstream os;
    os << "fractional partition puts weight on a subset containing the key set {1.." << r << "}";
    throw InputError(os.str());
  }
}

// Checks X1..Xk -> Y1..Yk, Z, T and returns k.
int check_with_t(const Channel& ch) {
  const auto k = static_cast<int>(ch.in_vars().size());
  if (k < 2) throw InputError("channel needs at least two terminal inputs");
  if (ch.out_vars().size() != static_cast<std::size_t>(k + 2))
    throw InputError("channel with auxiliary receiver must have outputs Y1..Yk, Z, T");
  for (int i = 0; i < k; ++i) {
    if (ch.in_vars()[static_cast<std::size_t>(i)].name != "X" + std::to_string(i + 1))
      throw InputError("channel inputs must be named X1..Xk");
    if (ch.out_vars()[static_cast<std::size_t>(i)].name != "Y" + std::to_string(i + 1))
      throw InputError("channel outputs must start with Y1..Yk");
  }
  if (ch.out_vars()[static_cast<std::size_t>(k)].name != "Z") throw InputError("channel output k+1 must be Z");
  return k;
}

std::size_t product_card(std::span<const VarSpec> vars) {
  std::size_t n = 1;
  for (const auto& v : vars) n *= static_cast<std::size_t>(v.card);
  return n;
}

}  // namespace

void check_system(const WiMWCSystem& sys) {
  if (sys.k < 2) throw InputError("system: k must be at least 2");
  if (sys.r < 1 || sys.r > sys.k) throw InputError("system: r must lie in [1, k]");
  dbbound::check_terminal_channel(sys.main, sys.k);
  for (std::size_t l = 0; l < sys.parallels.size(); ++l) {
    const auto& p = sys.parallels[l];
    if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha))
      throw InputError("system: parallel channel " + std::to_string(l + 1) + " has a negative or non-finite rate");
    dbbound::check_terminal_channel(p.channel, sys.k);
  }
}

void check_config(const OptimizerConfig& cfg) {
  if (cfg.restarts < 1) throw InputError("optimizer: restarts must be at least 1");
  if (cfg.max_iters < 1) throw InputError("optimizer: max_iters must be at least 1");
  if (!(cfg.step_init > 0.0)) throw InputError("optimizer: step_init must be positive");
  if (!(cfg.tol >= 0.0)) throw InputError("optimizer: tol must be nonnegative");
  if (cfg.grid_res && *cfg.grid_res < 2) throw InputError("optimizer: grid resolution must be at least 2");
  if (cfg.card_u && *cfg.card_u < 1) throw InputError("optimizer: |U| must be at least 1");
  if (cfg.card_v && *cfg.card_v < 1) throw InputError("optimizer: |V| must be at least 1");
}

Channel t_equals_z(const Channel& ch) {
  if (ch.out_vars().empty() || ch.out_vars().back().name != "Z") throw InputError("t_equals_z: channel has no Z output");
  std::vector<VarSpec> in = ch.in_vars();
  in.insert(in.end(), ch.out_vars().begin(), ch.out_vars().end());
  const int z_card = ch.out_vars().back().card;
  return Channel::deterministic(in, {{"T", z_card}}, [](std::span<const int> a) { return std::vector<int>{a.back()}; });
}

Channel AuxReceiver::for_channel(const Channel& ch, int k) const {
  if (is_copy_z()) return t_equals_z(ch);
  const auto& aux = std::get<Channel>(spec_);
  dbbound::check_aux_channel(aux, ch, k);
  return aux;
}

Channel compose_aux(const Channel& ch, const Channel& aux) {
  std::vector<VarSpec> expect = ch.in_vars();
  expect.insert(expect.end(), ch.out_vars().begin(), ch.out_vars().end());
  if (aux.in_vars() != expect) throw InputError("compose_aux: receiver must read the channel's inputs and outputs");
  if (aux.out_vars().size() != 1) throw InputError("compose_aux: receiver must emit one variable");
  std::vector<VarSpec> outs = ch.out_vars();
  outs.push_back(aux.out_vars()[0]);
  const std::size_t no = ch.out_size();
  const std::size_t nt = aux.out_size();
  std::vector<double> p(ch.in_size() * no * nt, 0.0);
  for (std::size_t x = 0; x < ch.in_size(); ++x)
    for (std::size_t o = 0; o < no; ++o) {
      const double w = ch.at(x, o);
      if (w == 0.0) continue;
      const auto trow = aux.row(x * no + o);
      for (std::size_t t = 0; t < nt; ++t) p[(x * no + o) * nt + t] = w * trow[t];
    }
  return Channel(ch.in_vars(), std::move(outs), std::move(p));
}

double v_objective(const JointDist& px, const Channel& ch_with_t, const Channel& puv, const FractionalPartition& fp,
                   int r) {
  const int k = check_with_t(ch_with_t);
  check_lambda(fp, k, r);
  if (px.vars() != ch_with_t.in_vars()) throw InputError("v_objective: input law must be over X1..Xk");
  std::vector<VarSpec> uv_in = ch_with_t.in_vars();
  uv_in.insert(uv_in.end(), ch_with_t.out_vars().begin(), ch_with_t.out_vars().begin() + k);
  if (puv.in_vars() != uv_in) throw InputError("v_objective: auxiliary law must read X1..Xk, Y1..Yk");
  if (puv.out_vars().size() != 2 || puv.out_vars()[0].name != "U" || puv.out_vars()[1].name != "V")
    throw InputError("v_objective: auxiliary law must emit U, V");

  const JointDist joint = push_through(push_through(px, ch_with_t), puv);
  const std::string t = ch_with_t.out_vars().back().name;
  Groups xy, x;
  for (int i = 0; i < k; ++i) {
    const std::string s = std::to_string(i + 1);
    xy.push_back({"X" + s, "Y" + s});
    x.push_back({"X" + s});
  }
  return i_lambda(joint, xy, fp, {t}) - i_lambda(joint, x, fp) + cond_mutual_info(joint, {"V"}, {t}, {"U"}) -
         cond_mutual_info(joint, {"V"}, {"Z"}, {"U"});
}

// ------------------------------------------------------------- VObjective

struct VObjective::Impl {
  std::size_t nx = 1, ny = 1, nzt = 1, nuv = 1;
  std::vector<double> w;  // nx * (ny * nzt)
  optim::EntropyBasis basis;
  std::vector<double> coef;

  Impl(const Channel& ch, const FractionalPartition& fp, int card_u, int card_v) : basis(axis_cards(ch, card_u, card_v)) {
    const int k = check_with_t(ch);
    nx = ch.in_size();
    ny = product_card(std::span(ch.out_vars()).first(static_cast<std::size_t>(k)));
    nzt = ch.out_size() / ny;
    nuv = static_cast<std::size_t>(card_u) * static_cast<std::size_t>(card_v);
    w = ch.probs();

    auto bit = [](int b) { return std::uint32_t{1} << b; };
    auto group = [&](fracpart::Subset s, bool with_y) {
      std::uint32_t m = 0;
      for (int i = 0; i < k; ++i)
        if (s & (fracpart::Subset{1} << i)) m |= bit(i) | (with_y ? bit(k + i) : 0U);
      return m;
    };
    const std::uint32_t z = bit(2 * k), t = bit(2 * k + 1), u = bit(2 * k + 2), v = bit(2 * k + 3);
    const fracpart::Subset all = fracpart::full_set(k);

    optim::EntropyExpr e;
    // I_l(X_iY_i ; ... | T) = H(G|T) - sum_B l_B [H(G|T) - H(G_{B^c}|T)]
    auto add_i_lambda = [&](bool with_y, std::uint32_t cond, double sign) {
      auto add_ce = [&](std::uint32_t a, double c) {
        e.add_entropy(basis, a | cond, sign * c);
        e.add_entropy(basis, cond, -sign * c);
      };
      add_ce(group(all, with_y), 1.0);
      for (const auto& [b, lw] : fp.support()) {
        add_ce(group(all, with_y), -lw);
        add_ce(group(all & ~b, with_y), lw);
      }
    };
    add_i_lambda(true, t, 1.0);
    add_i_lambda(false, 0, -1.0);
    e.add_cmi(basis, v, t, u, 1.0);
    e.add_cmi(basis, v, z, u, -1.0);
    coef = e.dense(basis.term_count());
  }

  static std::vector<int> axis_cards(const Channel& ch, int card_u, int card_v) {
    std::vector<int> c;
    for (const auto& x : ch.in_vars()) c.push_back(x.card);
    for (const auto& y : ch.out_vars()) c.push_back(y.card);
    c.push_back(card_u);
    c.push_back(card_v);
    return c;
  }

  void build_joint(std::span<const double> px, std::span<const double> aux, std::vector<double>& joint) const {
    joint.assign(nx * ny * nzt * nuv, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      if (px[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t zt = 0; zt < nzt; ++zt) {
          const std::size_t o = y * nzt + zt;
          const double m = px[x] * w[x * ny * nzt + o];
          if (m == 0.0) continue;
          const double* a = aux.data() + (x * ny + y) * nuv;
          double* out = joint.data() + (x * ny * nzt + o) * nuv;
          for (std::size_t uv = 0; uv < nuv; ++uv) out[uv] = m * a[uv];
        }
    }
  }
};

VObjective::VObjective(const Channel& ch_with_t, const FractionalPartition& fp, int card_u, int card_v) {
  check_with_t(ch_with_t);
  if (card_u < 1 || card_v < 1) throw InputError("auxiliary cardinalities must be positive");
  impl_ = std::make_unique<Impl>(ch_with_t, fp, card_u, card_v);
}
VObjective::~VObjective() = default;
VObjective::VObjective(VObjective&&) noexcept = default;
VObjective& VObjective::operator=(VObjective&&) noexcept = default;

std::size_t VObjective::x_size() const noexcept { return impl_->nx; }
std::size_t VObjective::y_size() const noexcept { return impl_->ny; }
std::size_t VObjective::uv_size() const noexcept { return impl_->nuv; }

double VObjective::value(std::span<const double> px, std::span<const double> aux) const {
  return value_and_gradient(px, aux, nullptr, nullptr);
}

double VObjective::value_and_gradient(std::span<const double> px, std::span<const double> aux,
                                      std::vector<double>* grad_px, std::vector<double>* grad_aux) const {
  const auto& m = *impl_;
  if (px.size() != m.nx || aux.size() != m.nx * m.ny * m.nuv) throw InputError("VObjective: argument size mismatch");
  std::vector<double> joint;
  m.build_joint(px, aux, joint);
  optim::EntropyBasis::Eval ev;
  m.basis.evaluate(joint, ev);
  double val = 0.0;
  for (std::size_t t = 0; t < m.coef.size(); ++t) val += m.coef[t] * ev.h[t];
  if (!grad_px && !grad_aux) return val;

  std::vector<double> g(joint.size());
  m.basis.cell_gradient(ev, m.coef, g);
  if (grad_px) grad_px->assign(m.nx, 0.0);
  if (grad_aux) grad_aux->assign(m.nx * m.ny * m.nuv, 0.0);
  for (std::size_t x = 0; x < m.nx; ++x)
    for (std::size_t y = 0; y < m.ny; ++y)
      for (std::size_t zt = 0; zt < m.nzt; ++zt) {
        const std::size_t o = y * m.nzt + zt;
        const double wv = m.w[x * m.ny * m.nzt + o];
        if (wv == 0.0) continue;
        const double* a = aux.data() + (x * m.ny + y) * m.nuv;
        const double* gc = g.data() + (x * m.ny * m.nzt + o) * m.nuv;
        if (grad_px) {
          double s = 0.0;
          for (std::size_t uv = 0; uv < m.nuv; ++uv) s += a[uv] * gc[uv];
          (*grad_px)[x] += wv * s;
        }
        if (grad_aux) {
          double* ga = grad_aux->data() + (x * m.ny + y) * m.nuv;
          const double f = px[x] * wv;
          for (std::size_t uv = 0; uv < m.nuv; ++uv) ga[uv] += f * gc[uv];
        }
      }
  return val;
}

// ---------------------------------------------------------------- search

namespace {

struct Point {
  std::vector<double> px;
  std::vector<double> aux;
  double f = 0.0;
};

struct Ascent {
  const VObjective& obj;
  std::size_t evals = 0;

  double eval(const Point& p) {
    ++evals;
    return obj.value(p.px, p.aux);
  }

  // One projected-gradient step on p(x) with backtracking; keeps only improvements.
  void step_px(Point& p, double& step) {
    std::vector<double> g;
    obj.value_and_gradient(p.px, p.aux, &g, nullptr);
    ++evals;
    Point cand = p;
    for (int tries = 0; tries < 40; ++tries) {
      for (std::size_t i = 0; i < g.size(); ++i) cand.px[i] = p.px[i] + step * g[i];
      optim::project_to_simplex(cand.px);
      cand.f = eval(cand);
      if (cand.f > p.f) {
        p = std::move(cand);
        step = std::min(step * 2.0, 1e6);
        return;
      }
      step *= 0.5;
    }
  }

  void step_aux(Point& p, double& step) {
    std::vector<double> g;
    obj.value_and_gradient(p.px, p.aux, nullptr, &g);
    ++evals;
    const std::size_t nuv = obj.uv_size();
    Point cand = p;
    for (int tries = 0; tries < 40; ++tries) {
      for (std::size_t i = 0; i < g.size(); ++i) cand.aux[i] = p.aux[i] + step * g[i];
      for (std::size_t row = 0; row < g.size() / nuv; ++row)
        optim::project_to_simplex(std::span(cand.aux).subspan(row * nuv, nuv));
      cand.f = eval(cand);
      if (cand.f > p.f) {
        p = std::move(cand);
        step = std::min(step * 2.0, 1e6);
        return;
      }
      step *= 0.5;
    }
  }

  // Alternating block ascent; returns true on convergence within max_iters.
  bool run(Point& p, const OptimizerConfig& cfg, bool move_px, bool move_aux) {
    double sp = cfg.step_init, sa = cfg.step_init;
    p.f = eval(p);
    for (int it = 0; it < cfg.max_iters; ++it) {
      const double f0 = p.f;
      if (move_px) step_px(p, sp);
      if (move_aux) step_aux(p, sa);
      if (p.f - f0 <= cfg.tol) return true;
    }
    return false;
  }
};

std::vector<double> constant_aux(std::size_t rows, std::size_t nuv) {
  std::vector<double> a(rows * nuv, 0.0);
  for (std::size_t r = 0; r < rows; ++r) a[r * nuv] = 1.0;
  return a;
}

std::vector<double> random_aux(optim::Rng& rng, std::size_t rows, std::size_t nuv) {
  std::vector<double> a;
  a.reserve(rows * nuv);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto p = rng.simplex_point(nuv);
    a.insert(a.end(), p.begin(), p.end());
  }
  return a;
}

bool better(double cand, double best) { return cand > best; }

}  // namespace

VResult v_lambda(const Channel& ch, const Channel& aux, const FractionalPartition& fp, int r,
                 const OptimizerConfig& cfg, std::uint64_t stream_id) {
  check_config(cfg);
  const Channel cwt = compose_aux(ch, aux);
  const int k = check_with_t(cwt);
  check_lambda(fp, k, r);
  const auto nx_total = static_cast<int>(std::min<std::size_t>(ch.in_size(), 1u << 20));
  const int cu = cfg.card_u.value_or(nx_total + 1);
  const int cv = cfg.card_v.value_or(nx_total + 1);
  const VObjective obj(cwt, fp, cu, cv);
  const std::size_t nx = obj.x_size();
  const std::size_t rows = nx * obj.y_size();
  const std::size_t nuv = obj.uv_size();
  const bool aux_free = nuv > 1;

  VResult res;
  res.card_u = cu;
  res.card_v = cv;
  Ascent asc{obj};
  bool have = false;
  Point best;

  auto consider = [&](Point&& p, bool conv) {
    if (!have || better(p.f, best.f)) {
      best = std::move(p);
      res.converged = conv;
      have = true;
    }
  };

  if (cfg.grid_res) {
    const std::size_t pts = optim::simplex_grid_size(nx, *cfg.grid_res);
    if (pts > kMaxGridPoints) throw SizeError("grid search would visit too many input distributions");
    bool all_conv = true;
    optim::for_each_simplex_grid_point(nx, *cfg.grid_res, [&](std::span<const double> grid_px) {
      // The inner search depends on p(x) only, so values on nested grids agree.
      Point local;
      bool local_have = false;
      bool local_conv = true;
      const int inner = aux_free ? cfg.restarts + 1 : 1;
      for (int rs = 0; rs < inner; ++rs) {
        Point p;
        p.px.assign(grid_px.begin(), grid_px.end());
        if (rs == 0) {
          p.aux = constant_aux(rows, nuv);
        } else {
          optim::Rng rng(optim::derive_seed(cfg.master_seed, stream_id, static_cast<std::uint64_t>(rs - 1)));
          p.aux = random_aux(rng, rows, nuv);
        }
        bool conv = true;
        if (aux_free)
          conv = asc.run(p, cfg, false, true);
        else
          p.f = asc.eval(p);
        if (!local_have || better(p.f, local.f)) {
          local = std::move(p);
          local_conv = conv;
          local_have = true;
        }
      }
      all_conv = all_conv && local_conv;
      consider(std::move(local), local_conv);
    });
    res.converged = all_conv;
  } else {
    bool all_conv = true;
    for (int rs = 0; rs < cfg.restarts; ++rs) {
      optim::Rng rng(optim::derive_seed(cfg.master_seed, stream_id, static_cast<std::uint64_t>(rs)));
      Point p;
      if (rs == 0) {
        p.px.assign(nx, 1.0 / static_cast<double>(nx));
        p.aux = constant_aux(rows, nuv);
      } else {
        p.px = rng.simplex_point(nx);
        p.aux = random_aux(rng, rows, nuv);
      }
      const bool conv = asc.run(p, cfg, true, aux_free);
      all_conv = all_conv && conv;
      consider(std::move(p), conv);
    }
    res.converged = all_conv;
  }
  res.value = best.f;
  res.px = std::move(best.px);
  res.puv = std::move(best.aux);
  res.evaluations = asc.evals;
  return res;
}

BoundReport theorem1_bound(const WiMWCSystem& sys, const AuxReceiver& aux, const FractionalPartition& fp,
                           const OptimizerConfig& cfg) {
  check_system(sys);
  check_config(cfg);
  check_lambda(fp, sys.k, sys.r);
  BoundReport rep;
  rep.mode = cfg.grid_res ? Mode::kGrid : Mode::kHeuristic;
  rep.certified = false;

  rep.per_channel.push_back({"main", 1.0, v_lambda(sys.main, aux.for_channel(sys.main, sys.k), fp, sys.r, cfg, 0)});
  for (std::size_t l = 0; l < sys.parallels.size(); ++l) {
    const auto& p = sys.parallels[l];
    rep.per_channel.push_back({"parallel-" + std::to_string(l + 1), p.alpha,
                               v_lambda(p.channel, aux.for_channel(p.channel, sys.k), fp, sys.r, cfg, l + 1)});
  }
  double total = 0.0;
  for (const auto& c : rep.per_channel) total += c.alpha * c.v.value;
  rep.value = total;
  return rep;
}

}  // namespace wimwc::keybound
