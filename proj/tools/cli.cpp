#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wimwc/dbbound.hpp"
#include "wimwc/errors.hpp"
#include "wimwc/io.hpp"
#include "wimwc/keybound.hpp"
#include "wimwc/lambda_mi.hpp"
#include "wimwc/macregion.hpp"
#include "wimwc/presets.hpp"
#include "wimwc/selfcheck.hpp"

namespace wimwc::cli {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", std::abs(v) < 5e-7 ? 0.0 : v);  // no "-0.000000"
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Globals {
  std::optional<double> tol;
  std::uint64_t seed = 0;
  int restarts = 4;
  std::optional<int> grid;
  std::optional<int> card_u, card_v;
  std::optional<int> max_iters;
  std::string t_receiver = "z";
  std::string csv, json;
  bool drop_6b = false;
  double scale = 1.0;
  std::string lambda = "uniform-km1";
  std::string groups, cond;
};

keybound::OptimizerConfig optimizer(const Globals& g) {
  keybound::OptimizerConfig cfg;
  cfg.restarts = g.restarts;
  cfg.master_seed = g.seed;
  if (g.tol) cfg.tol = *g.tol;
  if (g.max_iters) cfg.max_iters = *g.max_iters;
  cfg.grid_res = g.grid;
  cfg.card_u = g.card_u;
  cfg.card_v = g.card_v;
  keybound::check_config(cfg);
  return cfg;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// "X1,Y1|X2,Y2"; empty means one group per variable.
Groups parse_groups(const std::string& text, const JointDist& d, const NameSet& cond) {
  Groups g;
  if (text.empty()) {
    for (const auto& v : d.vars())
      if (std::find(cond.begin(), cond.end(), v.name) == cond.end()) g.push_back({v.name});
    return g;
  }
  for (const auto& block : split(text, '|')) {
    NameSet names;
    for (const auto& n : split(block, ','))
      if (!n.empty()) names.push_back(n);
    if (names.empty()) throw InputError("--groups: empty group in '" + text + "'");
    g.push_back(std::move(names));
  }
  return g;
}

NameSet parse_cond(const std::string& text) {
  NameSet c;
  if (text.empty()) return c;
  for (const auto& n : split(text, ','))
    if (!n.empty()) c.push_back(n);
  return c;
}

std::string lambda_line(const fracpart::FractionalPartition& fp) {
  std::string s;
  for (const auto& [b, w] : fp.support()) {
    if (!s.empty()) s += " ";
    s += fracpart::format_subset(b, fp.k()) + ":" + fmt6(w);
  }
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (!path.empty()) io::write_file(path, text);
}

int cmd_ilambda(const Globals& g, const std::string& file, std::ostream& out) {
  const auto d = io::load(file, io::parse_dist);
  const auto cond = parse_cond(g.cond);
  const auto groups = parse_groups(g.groups, d, cond);
  const auto fp = io::lambda_from_arg(g.lambda, static_cast<int>(groups.size()));
  const double v = i_lambda(d, groups, fp, cond);
  out << "k         " << groups.size() << "\n";
  out << "lambda    " << lambda_line(fp) << "\n";
  out << "I_lambda  " << fmt6(v) << "\n";
  emit(g.csv, "i_lambda\n" + full(v) + "\n");
  emit(g.json, "{\n  \"k\": " + std::to_string(groups.size()) + ",\n  \"lambda\": " + io::lambda_json(fp) +
                   ",\n  \"i_lambda\": " + full(v) + "\n}\n");
  return 0;
}

int cmd_tightest(const Globals& g, const std::string& file, std::ostream& out) {
  const auto d = io::load(file, io::parse_dist);
  const auto cond = parse_cond(g.cond);
  const auto groups = parse_groups(g.groups, d, cond);
  const int k = static_cast<int>(groups.size());
  const auto terms = lambda_terms(d, groups, cond);
  std::vector<double> c(terms.block_entropy.size());
  for (std::size_t b = 0; b < c.size(); ++b) c[b] = -terms.block_entropy[b];
  const auto opt = fracpart::optimize_linear(k, c, fracpart::Sense::kMin);
  const double v = i_lambda(d, groups, opt.lambda, cond);
  out << "k         " << k << "\n";
  out << "lambda    " << lambda_line(opt.lambda) << "\n";
  out << "I_lambda  " << fmt6(v) << "\n";
  emit(g.csv, "i_lambda\n" + full(v) + "\n");
  emit(g.json, "{\n  \"k\": " + std::to_string(k) + ",\n  \"lambda\": " + io::lambda_json(opt.lambda) +
                   ",\n  \"i_lambda\": " + full(v) + "\n}\n");
  return 0;
}

void print_sides(std::ostream& out, const std::string& label, const dbbound::Lemma1Sides& s) {
  out << label << "\n";
  out << "  lhs           " << fmt6(s.lhs) << "\n";
  out << "  rhs           " << fmt6(s.rhs) << "\n";
  for (std::size_t j = 0; j < s.rhs_terms.size(); ++j) out << "    step " << j + 1 << "      " << fmt6(s.rhs_terms[j]) << "\n";
  out << "  W dependence  " << fmt6(s.w_dependence) << "\n";
  out << "  holds         " << (s.lhs <= s.rhs + 1e-9 ? "yes" : "NO") << "\n";
}

int cmd_dbcheck(const Globals& g, const std::string& file, std::ostream& out) {
  const auto spec = io::load(file, io::parse_code);
  const auto fp = io::lambda_from_arg(g.lambda, spec.code.k);
  const auto trace = dbbound::simulate_code(spec.code, spec.channels, spec.aux);
  const auto z = dbbound::lemma1_sides(trace, fp, dbbound::Conditioning::kZ);
  std::optional<dbbound::Lemma1Sides> t;
  if (spec.aux) t = dbbound::lemma1_sides(trace, fp, dbbound::Conditioning::kT);
  const double gap = dbbound::memorylessness_gap(trace);
  out << "k = " << spec.code.k << ", n = " << spec.code.n << "\n";
  print_sides(out, "conditioning on Z", z);
  if (t) print_sides(out, "conditioning on T", *t);
  out << "memorylessness gap  " << fmt6(gap) << "\n";
  if (!g.csv.empty()) {
    std::string csv = "conditioning,lhs,rhs\nZ," + full(z.lhs) + "," + full(z.rhs) + "\n";
    if (t) csv += "T," + full(t->lhs) + "," + full(t->rhs) + "\n";
    emit(g.csv, csv);
  }
  emit(g.json, io::lemma1_json(z, t, gap) + "\n");
  return 0;
}

int cmd_keybound(const Globals& g, const std::string& file, std::ostream& out, std::ostream& err) {
  const auto sys = io::load(file, io::parse_system);
  const auto fp = io::lambda_from_arg(g.lambda, sys.k);
  const auto cfg = optimizer(g);
  const auto aux = g.t_receiver == "z" ? keybound::AuxReceiver::copy_z()
                                       : keybound::AuxReceiver::from_channel(io::load(g.t_receiver, io::parse_channel));
  const auto rep = keybound::theorem1_bound(sys, aux, fp, cfg);

  char line[160];
  std::snprintf(line, sizeof line, "%-12s %10s %12s %10s\n", "channel", "alpha", "V", "converged");
  out << line;
  std::string csv = "channel,alpha,v,converged\n";
  bool all_conv = true;
  for (const auto& c : rep.per_channel) {
    std::snprintf(line, sizeof line, "%-12s %10s %12s %10s\n", c.id.c_str(), fmt6(c.alpha).c_str(),
                  fmt6(c.v.value).c_str(), c.v.converged ? "yes" : "no");
    out << line;
    csv += c.id + "," + full(c.alpha) + "," + full(c.v.value) + "," + (c.v.converged ? "1" : "0") + "\n";
    all_conv = all_conv && c.v.converged;
  }
  out << "bound        " << fmt6(rep.value) << " bits\n";
  out << "mode         " << (rep.mode == keybound::Mode::kGrid ? "grid" : "heuristic") << "\n";
  out << "certified    no (lower estimate of the maximization)\n";
  if (!all_conv) err << "warning: some searches stopped at max_iters; values are best iterates\n";
  emit(g.csv, csv);
  emit(g.json, io::bound_report_json(rep) + "\n");
  return 0;
}

int cmd_macregion(const Globals& g, const std::string& file, std::ostream& out) {
  const auto mac = io::load(file, io::parse_mac);
  macregion::MacConfig cfg;
  cfg.opt = optimizer(g);
  cfg.drop_6b = g.drop_6b;
  const auto sum = macregion::outer_sum_rate(mac, cfg);
  const auto reg = macregion::outer_region(mac, cfg);
  out << "constraint 6b  " << (g.drop_6b ? "dropped" : "enforced") << "\n";
  out << "sum-rate bound " << fmt6(sum.value) << " bits\n";
  out << "region sum max " << fmt6(reg.sum_rate_max) << " bits\n";
  out << "vertices\n";
  for (const auto& [x, y] : reg.vertices) out << "  " << fmt6(x) << "  " << fmt6(y) << "\n";
  out << "certified      no (lower estimate of the maximization)\n";
  emit(g.csv, io::region_csv(reg));
  emit(g.json, io::region_json(reg, sum) + "\n");
  return 0;
}

int cmd_props(const Globals& g, std::ostream& out) {
  selfcheck::PropsOptions o;
  o.seed = g.seed;
  if (g.tol) o.tol = *g.tol;
  if (!(g.scale > 0.0)) throw InputError("--scale must be positive");
  o.scale = g.scale;
  const auto rep = selfcheck::run_properties(o);
  out << selfcheck::format_report(rep);
  if (!g.csv.empty()) {
    std::string csv = "property,instances,violations,worst_margin\n";
    for (const auto& r : rep.results)
      csv += r.name + "," + std::to_string(r.instances) + "," + std::to_string(r.violations) + "," +
             full(r.worst_margin) + "\n";
    emit(g.csv, csv);
  }
  emit(g.json, selfcheck::report_json(rep) + "\n");
  return rep.ok() ? 0 : 1;
}

int cmd_presets(const std::string& name, std::ostream& out) {
  if (name.empty()) {
    for (const auto& [n, desc] : presets::catalog()) {
      char line[160];
      std::snprintf(line, sizeof line, "%-26s %s\n", n.c_str(), desc.c_str());
      out << line;
    }
    return 0;
  }
  out << presets::by_name(name) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate information measures and secret-key capacity bounds for wiretap multi-way channels"};
  app.footer(std::string(io::schema_help()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--tol", g.tol, "props: violation tolerance (default 1e-9); optimizers: convergence tolerance (default 1e-7)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--restarts", g.restarts, "optimizer restarts")->check(CLI::PositiveNumber);
  app.add_option("--grid", g.grid, "exhaustive grid resolution over input laws")->check(CLI::Range(2, 1000));
  app.add_option("--aux-card-u", g.card_u, "|U| (default |X| + 1)")->check(CLI::PositiveNumber);
  app.add_option("--aux-card-v", g.card_v, "|V| (default |X| + 1)")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", g.max_iters, "optimizer iteration cap per run")->check(CLI::PositiveNumber);
  app.add_option("--t-receiver", g.t_receiver, "auxiliary receiver: z (T = Z) or a channel file");
  app.add_option("--csv", g.csv, "write a CSV result to this path");
  app.add_option("--json", g.json, "write a JSON report to this path");
  app.add_flag("--drop-6b", g.drop_6b, "macregion: drop the second dependence-balance constraint");
  app.add_option("--lambda", g.lambda, "uniform-km1, partition:1,2|3 or a lambda file");
  app.add_option("--groups", g.groups, "terminal groups, e.g. X1,Y1|X2,Y2 (default: one per variable)");
  app.add_option("--cond", g.cond, "conditioning variables, e.g. T or T1,T2");
  app.add_option("--scale", g.scale, "props: multiply every instance count");

  std::string file, preset;
  auto* il = app.add_subcommand("ilambda", "I_lambda of a distribution");
  il->add_option("dist", file, "distribution file")->required();
  auto* tl = app.add_subcommand("tightest-lambda", "lambda minimizing I_lambda, with the value");
  tl->add_option("dist", file, "distribution file")->required();
  auto* db = app.add_subcommand("dbcheck", "simulate a code and evaluate both dependence-balance sides");
  db->add_option("code", file, "code file")->required();
  auto* kb = app.add_subcommand("keybound", "secret-key capacity upper bound of a system");
  kb->add_option("system", file, "system file")->required();
  auto* mr = app.add_subcommand("macregion", "outer region of a MAC with generalized feedback");
  mr->add_option("mac", file, "MAC channel file")->required();
  auto* pr = app.add_subcommand("props", "run the property suite; exit 1 on a violation");
  auto* ps = app.add_subcommand("presets", "list bundled presets or print one as JSON");
  ps->add_option("name", preset, "preset name");
  for (auto* s : {il, tl, db, kb, mr, pr, ps}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (il->parsed()) return cmd_ilambda(g, file, out);
    if (tl->parsed()) return cmd_tightest(g, file, out);
    if (db->parsed()) return cmd_dbcheck(g, file, out);
    if (kb->parsed()) return cmd_keybound(g, file, out, err);
    if (mr->parsed()) return cmd_macregion(g, file, out);
    if (pr->parsed()) return cmd_props(g, out);
    if (ps->parsed()) return cmd_presets(preset, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace wimwc::cli
