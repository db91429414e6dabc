#include "wimwc/selfcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/lambda_mi.hpp"

namespace wimwc::selfcheck {

JointDist random_dist(optim::Rng& rng, std::vector<VarSpec> vars, double sparsity) {
  const std::size_t n = cell_count(vars);
  std::vector<double> p = rng.simplex_point(n);
  if (sparsity > 0.0 && n > 1) {
    double s = 0.0;
    for (auto& v : p) {
      if (rng.uniform() < sparsity) v = 0.0;
      s += v;
    }
    if (s <= 0.0) {
      p.assign(n, 0.0);
      p[rng.below(n)] = 1.0;
    } else {
      for (auto& v : p) v /= s;
    }
  }
  return JointDist(std::move(vars), std::move(p));
}

Channel random_channel(optim::Rng& rng, std::vector<VarSpec> in, std::vector<VarSpec> out, double sparsity) {
  const std::size_t ni = cell_count(in);
  const std::size_t no = cell_count(out);
  std::vector<double> probs;
  probs.reserve(ni * no);
  for (std::size_t r = 0; r < ni; ++r) {
    auto row = random_dist(rng, {{"_", static_cast<int>(no)}}, sparsity).probs();
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Channel(std::move(in), std::move(out), std::move(probs));
}

std::vector<VarSpec> random_vars(optim::Rng& rng, const std::string& prefix, int count, int min_card, int max_card) {
  std::vector<VarSpec> v;
  for (int i = 1; i <= count; ++i)
    v.push_back({prefix + std::to_string(i),
                 min_card + static_cast<int>(rng.below(static_cast<std::size_t>(max_card - min_card + 1)))});
  return v;
}

fracpart::Partition random_partition(optim::Rng& rng, int k, int min_blocks) {
  for (;;) {
    std::vector<int> label(static_cast<std::size_t>(k));
    int used = 0;
    for (int i = 0; i < k; ++i) {
      const int l = static_cast<int>(rng.below(static_cast<std::size_t>(used + 1)));
      label[static_cast<std::size_t>(i)] = l;
      used = std::max(used, l + 1);
    }
    if (used < min_blocks) continue;
    fracpart::Partition pi{k, std::vector<fracpart::Subset>(static_cast<std::size_t>(used), 0)};
    for (int i = 0; i < k; ++i) pi.blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] |= 1u << i;
    return pi;
  }
}

namespace {

const std::vector<fracpart::FractionalPartition>& cached_vertices(int k) {
  static std::array<std::vector<fracpart::FractionalPartition>, fracpart::kMaxVertexK + 1> cache;
  static std::array<std::once_flag, fracpart::kMaxVertexK + 1> once;
  std::call_once(once[static_cast<std::size_t>(k)], [k] { cache[static_cast<std::size_t>(k)] = fracpart::vertices(k); });
  return cache[static_cast<std::size_t>(k)];
}

}  // namespace

fracpart::FractionalPartition random_fp(optim::Rng& rng, int k) {
  const int parts = 1 + static_cast<int>(rng.below(3));
  std::vector<fracpart::FractionalPartition> pick;
  for (int m = 0; m < parts; ++m) {
    if (k <= fracpart::kMaxVertexK) {
      const auto& vs = cached_vertices(k);
      pick.push_back(vs[rng.below(vs.size())]);
    } else {
      pick.push_back(fracpart::preset_partition(random_partition(rng, k, 2)));
    }
  }
  const auto w = rng.simplex_point(pick.size());
  fracpart::FractionalPartition fp(k);
  for (fracpart::Subset b = 1; b < fracpart::full_set(k); ++b) {
    double v = 0.0;
    for (std::size_t m = 0; m < pick.size(); ++m) v += w[m] * pick[m].weight(b);
    if (v != 0.0) fp.set(b, v);
  }
  return fp;
}

RandomCode random_code(optim::Rng& rng, int k, int n, int max_w) {
  std::vector<VarSpec> in, out;
  for (int i = 1; i <= k; ++i) in.push_back({"X" + std::to_string(i), 2});
  for (int i = 1; i <= k; ++i) out.push_back({"Y" + std::to_string(i), 2});
  out.push_back({"Z", 2});
  const int n_channels = 1 + static_cast<int>(rng.below(2));
  std::vector<Channel> channels;
  for (int c = 0; c < n_channels; ++c) channels.push_back(random_channel(rng, in, out));
  std::vector<VarSpec> aux_in = in;
  aux_in.insert(aux_in.end(), out.begin(), out.end());
  RandomCode rc{{}, std::move(channels), random_channel(rng, aux_in, {{"T", 2}})};

  auto& code = rc.code;
  code.k = k;
  code.n = n;
  for (int i = 0; i < k; ++i) {
    const auto card = 1 + rng.below(static_cast<std::size_t>(max_w));
    code.w_dists.push_back(random_dist(rng, {{"W", static_cast<int>(card)}}, 0.0).probs());
  }
  for (int j = 0; j < n; ++j) code.schedule.push_back(static_cast<int>(rng.below(rc.channels.size())));
  code.encoders.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> table(dbbound::encoder_domain(code, rc.channels, i, j));
      for (auto& x : table) x = static_cast<int>(rng.below(2));
      code.encoders[static_cast<std::size_t>(i)].push_back(std::move(table));
    }
  return rc;
}

bool PropsReport::ok() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.violations == 0; });
}

namespace {

Groups singleton_groups(const JointDist& d, int k) {
  Groups g;
  for (int i = 0; i < k; ++i) g.push_back({d.vars()[static_cast<std::size_t>(i)].name});
  return g;
}

class Runner {
 public:
  explicit Runner(const PropsOptions& o) : opts_(o) {}

  // fn returns one or more margins per instance; each must be >= -tol.
  void run(const std::string& name, int base_count, const std::function<std::vector<double>(optim::Rng&, int)>& fn) {
    PropertyResult r;
    r.name = name;
    r.worst_margin = std::numeric_limits<double>::infinity();
    const int count = std::max(1, static_cast<int>(std::lround(base_count * opts_.scale)));
    const auto stream = static_cast<std::uint64_t>(rep_.results.size());
    for (int i = 0; i < count; ++i) {
      optim::Rng rng(optim::derive_seed(opts_.seed, stream, static_cast<std::uint64_t>(i)));
      bool bad = false;
      for (double m : fn(rng, i)) {
        r.worst_margin = std::min(r.worst_margin, m);
        if (!(m >= -opts_.tol)) bad = true;
      }
      ++r.instances;
      if (bad) ++r.violations;
    }
    rep_.results.push_back(r);
  }

  PropsReport take() { return std::move(rep_); }

 private:
  PropsOptions opts_;
  PropsReport rep_;
};

}  // namespace

PropsReport run_properties(const PropsOptions& opts) {
  Runner run(opts);

  run.run("nonnegativity", 1000, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 3;
    const auto d = random_dist(rng, random_vars(rng, "X", k, 1, 4));
    return std::vector<double>{i_lambda(d, singleton_groups(d, k), random_fp(rng, k))};
  });

  run.run("k2-reduction", 200, [](optim::Rng& rng, int) {
    auto vars = random_vars(rng, "X", 2, 1, 4);
    vars.push_back({"T", 1 + static_cast<int>(rng.below(3))});
    const auto d = random_dist(rng, vars);
    fracpart::FractionalPartition fp(2);
    fp.set(1, 1.0);
    fp.set(2, 1.0);
    const double gap = i_lambda(d, {{"X1"}, {"X2"}}, fp, {"T"}) - cond_mutual_info(d, {"X1"}, {"X2"}, {"T"});
    return std::vector<double>{-std::abs(gap)};
  });

  run.run("total-correlation-identities", 200, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 4;
    const auto d = random_dist(rng, random_vars(rng, "X", k, 1, k <= 4 ? 3 : 2));
    const auto g = singleton_groups(d, k);
    const auto a = example3_check(d, g);
    const auto b = example3_check(d, g, random_partition(rng, k, 2));
    return std::vector<double>{-std::abs(a.gap), -std::abs(b.gap)};
  });

  run.run("partition-bound", 300, [](optim::Rng& rng, int i) {
    const int k = 3 + i % 2;
    const auto d = random_dist(rng, random_vars(rng, "X", k, 1, 3));
    const auto r = thm41_check(d, singleton_groups(d, k), random_fp(rng, k));
    return std::vector<double>{r.lhs - r.rhs_min};
  });

  run.run("data-processing", 200, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 2;
    const auto d = random_dist(rng, random_vars(rng, "X", k, 1, 3));
    std::vector<Channel> chans;
    for (int m = 0; m < k; ++m)
      chans.push_back(random_channel(rng, {d.vars()[static_cast<std::size_t>(m)]},
                                     {{"Y" + std::to_string(m + 1), 1 + static_cast<int>(rng.below(3))}}));
    const auto r = data_processing_gap(d, singleton_groups(d, k), random_fp(rng, k), chans);
    return std::vector<double>{r.before - r.after};
  });

  run.run("private-noise", 200, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 2;
    auto vars = random_vars(rng, "X", k, 1, 3);
    const auto noise_vars = random_vars(rng, "N", k, 1, 2);
    const auto d = random_dist(rng, vars);
    // Product law of d and one independent noise variable per terminal.
    std::vector<VarSpec> all = vars;
    std::vector<double> p = d.probs();
    for (const auto& nv : noise_vars) {
      const auto noise = random_dist(rng, {nv});
      std::vector<double> next;
      for (double a : p)
        for (double b : noise.probs()) next.push_back(a * b);
      p = std::move(next);
      all.push_back(nv);
    }
    const JointDist joint(all, p);
    const auto fp = random_fp(rng, k);
    Groups g = singleton_groups(d, k), gn = g;
    for (int m = 0; m < k; ++m) gn[static_cast<std::size_t>(m)].push_back(noise_vars[static_cast<std::size_t>(m)].name);
    return std::vector<double>{-std::abs(i_lambda(joint, gn, fp) - i_lambda(d, g, fp))};
  });

  run.run("concavity-x1", 100, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 2;
    const auto vars = random_vars(rng, "X", k, 2, 3);
    const std::vector<VarSpec> rest(vars.begin() + 1, vars.end());
    const auto cond = random_channel(rng, {vars[0]}, rest);
    const auto p1 = random_dist(rng, {vars[0]});
    const auto p2 = random_dist(rng, {vars[0]});
    std::vector<double> mid(p1.size());
    for (std::size_t m = 0; m < mid.size(); ++m) mid[m] = 0.5 * (p1.probs()[m] + p2.probs()[m]);
    const auto fp = random_fp(rng, k);
    auto value = [&](const JointDist& px) {
      const auto j = push_through(px, cond);
      return i_lambda(j, singleton_groups(j, k), fp);
    };
    return std::vector<double>{value(JointDist({vars[0]}, mid)) - 0.5 * (value(p1) + value(p2))};
  });

  run.run("dependence-balance", 200, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 2;
    const int n = 1 + (i / 2) % 3;
    const auto rc = random_code(rng, k, n, 2);
    const auto trace = dbbound::simulate_code(rc.code, rc.channels, rc.aux);
    const auto fp = random_fp(rng, k);
    const auto z = dbbound::lemma1_sides(trace, fp, dbbound::Conditioning::kZ);
    const auto t = dbbound::lemma1_sides(trace, fp, dbbound::Conditioning::kT);
    return std::vector<double>{z.rhs - z.lhs, t.rhs - t.lhs, -dbbound::memorylessness_gap(trace),
                               -std::abs(z.w_dependence)};
  });

  run.run("chain-rule", 500, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 3;
    const auto d = random_dist(rng, random_vars(rng, "X", k, 1, 4));
    NameSet a, b;
    for (const auto& v : d.vars()) (rng.below(2) ? a : b).push_back(v.name);
    if (a.empty()) std::swap(a, b);
    NameSet ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const double gap = entropy(d, ab) - entropy(d, a) - (b.empty() ? 0.0 : cond_entropy(d, b, a));
    return std::vector<double>{-std::abs(gap)};
  });

  run.run("mi-data-processing", 200, [](optim::Rng& rng, int) {
    const auto d = random_dist(rng, random_vars(rng, "X", 2, 1, 4));
    const auto ch = random_channel(rng, {d.vars()[1]}, {{"C", 1 + static_cast<int>(rng.below(4))}});
    const auto j = push_through(d, ch);
    return std::vector<double>{cond_mutual_info(j, {"X1"}, {"X2"}) - cond_mutual_info(j, {"X1"}, {"C"})};
  });

  run.run("polytope-lp", 100, [](optim::Rng& rng, int i) {
    const int k = 2 + i % 4;
    std::vector<double> c(std::size_t{1} << k);
    for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
    std::vector<double> margins;
    for (auto sense : {fracpart::Sense::kMin, fracpart::Sense::kMax}) {
      double best = sense == fracpart::Sense::kMin ? 1e300 : -1e300;
      for (const auto& v : cached_vertices(k)) {
        double s = 0.0;
        for (fracpart::Subset b = 1; b < fracpart::full_set(k); ++b) s += c[b] * v.weight(b);
        best = sense == fracpart::Sense::kMin ? std::min(best, s) : std::max(best, s);
      }
      margins.push_back(-std::abs(fracpart::optimize_linear(k, c, sense).value - best));
      margins.push_back(-std::abs(fracpart::optimize_linear_simplex(k, c, sense).value - best));
    }
    return margins;
  });

  return run.take();
}

std::string format_report(const PropsReport& rep) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %10s %11s %15s\n", "property", "instances", "violations", "worst_margin");
  os << line;
  for (const auto& r : rep.results) {
    // Round-off below the printed precision is shown as zero.
    const double shown = std::abs(r.worst_margin) < 5e-7 ? 0.0 : r.worst_margin;
    std::snprintf(line, sizeof line, "%-22s %10zu %11zu %15.6f\n", r.name.c_str(), r.instances, r.violations, shown);
    os << line;
  }
  os << (rep.ok() ? "all properties hold\n" : "VIOLATIONS FOUND\n");
  return os.str();
}

std::string report_json(const PropsReport& rep) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rep.results)
    arr.push_back({{"name", r.name},
                   {"instances", r.instances},
                   {"violations", r.violations},
                   {"worst_margin", r.worst_margin}});
  return nlohmann::json{{"ok", rep.ok()}, {"properties", arr}}.dump(2);
}

}  // namespace wimwc::selfcheck
