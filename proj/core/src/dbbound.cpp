#include "wimwc/dbbound.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wimwc/errors.hpp"
#include "wimwc/lambda_mi.hpp"

namespace wimwc::dbbound {

namespace {

std::string idx(int i) { return std::to_string(i + 1); }

// Per-step block width in the base tensor: Y_1..Y_k, Z and optionally T.
int step_width(int k, bool aux) { return k + 1 + (aux ? 1 : 0); }

std::size_t base_axis_y(int k, bool aux, int i, int j) {
  return static_cast<std::size_t>(k + j * step_width(k, aux) + i);
}

}  // namespace

std::string w_name(int i) { return "W" + idx(i); }
std::string x_name(int i, int j) { return "X" + idx(i) + "_" + idx(j); }
std::string y_name(int i, int j) { return "Y" + idx(i) + "_" + idx(j); }
std::string z_name(int j) { return "Z_" + idx(j); }
std::string t_name(int j) { return "T_" + idx(j); }

void check_terminal_channel(const Channel& ch, int k) {
  if (ch.in_vars().size() != static_cast<std::size_t>(k))
    throw InputError("channel must have exactly k inputs X1..Xk");
  if (ch.out_vars().size() != static_cast<std::size_t>(k + 1))
    throw InputError("channel must have exactly k+1 outputs Y1..Yk, Z");
  for (int i = 0; i < k; ++i) {
    if (ch.in_vars()[static_cast<std::size_t>(i)].name != "X" + idx(i))
      throw InputError("channel input " + idx(i) + " must be named X" + idx(i));
    if (ch.out_vars()[static_cast<std::size_t>(i)].name != "Y" + idx(i))
      throw InputError("channel output " + idx(i) + " must be named Y" + idx(i));
  }
  if (ch.out_vars().back().name != "Z") throw InputError("last channel output must be named Z");
}

void check_aux_channel(const Channel& aux, const Channel& ch, int k) {
  std::vector<VarSpec> expect = ch.in_vars();
  expect.insert(expect.end(), ch.out_vars().begin(), ch.out_vars().end());
  if (aux.in_vars() != expect)
    throw InputError("auxiliary receiver must read (X1..X" + idx(k - 1) + ", Y1..Y" + idx(k - 1) +
                     ", Z) with the channel's cardinalities");
  if (aux.out_vars().size() != 1) throw InputError("auxiliary receiver must emit exactly one variable");
}

std::size_t encoder_domain(const InteractiveCode& code, const std::vector<Channel>& channels, int i, int j) {
  std::size_t size = code.w_dists[static_cast<std::size_t>(i)].size();
  for (int s = 0; s < j; ++s) {
    const auto& ch = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(s)])];
    size *= static_cast<std::size_t>(ch.out_vars()[static_cast<std::size_t>(i)].card);
    if (size > kMaxCells) throw SizeError("encoder table exceeds the cell cap");
  }
  return size;
}

namespace {

void check_code(const InteractiveCode& code, const std::vector<Channel>& channels,
                const std::optional<Channel>& aux) {
  if (code.k < 1) throw InputError("code: k must be positive");
  if (code.n < 1) throw InputError("code: n must be positive");
  if (channels.empty()) throw InputError("code: no channels given");
  for (const auto& ch : channels) check_terminal_channel(ch, code.k);
  if (code.schedule.size() != static_cast<std::size_t>(code.n))
    throw InputError("code: schedule must list one channel per step");
  for (int s : code.schedule)
    if (s < 0 || static_cast<std::size_t>(s) >= channels.size())
      throw InputError("code: schedule refers to channel " + std::to_string(s) + " which does not exist");
  if (aux)
    for (int s : code.schedule) check_aux_channel(*aux, channels[static_cast<std::size_t>(s)], code.k);

  if (code.w_dists.size() != static_cast<std::size_t>(code.k))
    throw InputError("code: need one private-randomness distribution per terminal");
  for (std::size_t i = 0; i < code.w_dists.size(); ++i) {
    const auto& w = code.w_dists[i];
    if (w.empty()) throw InputError("code: empty distribution for W" + std::to_string(i + 1));
    double s = 0.0;
    for (double p : w) {
      if (!(p >= -kClampTol)) throw InputError("code: negative probability in W" + std::to_string(i + 1));
      s += p;
    }
    if (std::abs(s - 1.0) > kMassTol) throw InputError("code: W" + std::to_string(i + 1) + " does not sum to 1");
  }
  if (code.encoders.size() != static_cast<std::size_t>(code.k))
    throw InputError("code: need encoders for every terminal");
  for (int i = 0; i < code.k; ++i) {
    const auto& enc = code.encoders[static_cast<std::size_t>(i)];
    if (enc.size() != static_cast<std::size_t>(code.n))
      throw InputError("code: terminal " + idx(i) + " needs one encoder per step");
    for (int j = 0; j < code.n; ++j) {
      const auto& table = enc[static_cast<std::size_t>(j)];
      const auto want = encoder_domain(code, channels, i, j);
      if (table.size() != want) {
        std::ostringstream os;
        os << "code: encoder (" << i + 1 << "," << j + 1 << ") has " << table.size() << " entries, expected " << want;
        throw InputError(os.str());
      }
      const int card = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(j)])]
                           .in_vars()[static_cast<std::size_t>(i)]
                           .card;
      for (int x : table)
        if (x < 0 || x >= card) {
          std::ostringstream os;
          os << "code: encoder (" << i + 1 << "," << j + 1 << ") emits " << x
             << " outside the scheduled channel's input alphabet";
          throw InputError(os.str());
        }
    }
  }
}

// Channel input of terminal i at step j for a base-tensor outcome.
int encode(const InteractiveCode& code, const std::vector<Channel>& channels, bool aux,
           std::span<const int> outcome, int i, int j) {
  std::size_t pos = static_cast<std::size_t>(outcome[static_cast<std::size_t>(i)]);
  for (int s = 0; s < j; ++s) {
    const auto& ch = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(s)])];
    pos = pos * static_cast<std::size_t>(ch.out_vars()[static_cast<std::size_t>(i)].card) +
          static_cast<std::size_t>(outcome[base_axis_y(code.k, aux, i, s)]);
  }
  return code.encoders[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][pos];
}

}  // namespace

TraceDist simulate_code(const InteractiveCode& code, const std::vector<Channel>& channels,
                        const std::optional<Channel>& aux) {
  check_code(code, channels, aux);
  const int k = code.k;
  const bool has_aux = aux.has_value();

  std::vector<VarSpec> vars;
  std::vector<double> probs{1.0};
  for (int i = 0; i < k; ++i) {
    const auto& w = code.w_dists[static_cast<std::size_t>(i)];
    vars.push_back({w_name(i), static_cast<int>(w.size())});
    std::vector<double> next(probs.size() * w.size());
    for (std::size_t a = 0; a < probs.size(); ++a)
      for (std::size_t b = 0; b < w.size(); ++b) next[a * w.size() + b] = probs[a] * std::max(0.0, w[b]);
    probs = std::move(next);
  }

  for (int j = 0; j < code.n; ++j) {
    const auto& ch = channels[static_cast<std::size_t>(code.schedule[static_cast<std::size_t>(j)])];
    const std::size_t no = ch.out_size();
    const std::size_t nt = has_aux ? aux->out_size() : 1;
    std::vector<VarSpec> step_vars;
    for (int i = 0; i < k; ++i) step_vars.push_back({y_name(i, j), ch.out_vars()[static_cast<std::size_t>(i)].card});
    step_vars.push_back({z_name(j), ch.out_vars().back().card});
    if (has_aux) step_vars.push_back({t_name(j), aux->out_vars()[0].card});

    std::vector<VarSpec> next_vars = vars;
    next_vars.insert(next_vars.end(), step_vars.begin(), step_vars.end());
    const std::size_t total = cell_count(next_vars);

    std::vector<int> cards;
    for (const auto& v : vars) cards.push_back(v.card);
    std::vector<int> in_cards;
    for (const auto& v : ch.in_vars()) in_cards.push_back(v.card);

    std::vector<double> next(total, 0.0);
    std::vector<int> x(static_cast<std::size_t>(k));
    for (std::size_t cell = 0; cell < probs.size(); ++cell) {
      const double p = probs[cell];
      if (p <= 0.0) continue;
      const auto outcome = unravel(cell, cards);
      for (int i = 0; i < k; ++i) x[static_cast<std::size_t>(i)] = encode(code, channels, has_aux, outcome, i, j);
      const std::size_t xi = ravel(x, in_cards);
      const auto row = ch.row(xi);
      for (std::size_t o = 0; o < no; ++o) {
        if (row[o] <= 0.0) continue;
        const double po = p * row[o];
        if (has_aux) {
          const auto trow = aux->row(xi * no + o);
          for (std::size_t t = 0; t < nt; ++t) next[(cell * no + o) * nt + t] = po * trow[t];
        } else {
          next[cell * no + o] = po;
        }
      }
    }
    vars = std::move(next_vars);
    probs = std::move(next);
  }
  return TraceDist(code, channels, JointDist(std::move(vars), std::move(probs)), has_aux);
}

// ---------------------------------------------------------------- TraceDist

TraceDist::TraceDist(InteractiveCode code, std::vector<Channel> channels, JointDist base, bool has_aux)
    : code_(std::move(code)), channels_(std::move(channels)), base_(std::move(base)), has_aux_(has_aux) {}

int TraceDist::x_card(int i, int j) const {
  return channels_[static_cast<std::size_t>(code_.schedule[static_cast<std::size_t>(j)])]
      .in_vars()[static_cast<std::size_t>(i)]
      .card;
}

NameSet TraceDist::all_names() const {
  NameSet out;
  for (int i = 0; i < k(); ++i) out.push_back(w_name(i));
  for (int j = 0; j < n(); ++j) {
    for (int i = 0; i < k(); ++i) out.push_back(x_name(i, j));
    for (int i = 0; i < k(); ++i) out.push_back(y_name(i, j));
    out.push_back(z_name(j));
    if (has_aux_) out.push_back(t_name(j));
  }
  return out;
}

JointDist TraceDist::marginal(const NameSet& names) const {
  if (names.empty()) throw InputError("trace marginal: empty variable set");
  const NameSet canon = all_names();
  struct Req {
    std::size_t canon_pos;
    std::string name;
    int base_axis;  // -1 for derived channel inputs
    int i, j, card;
  };
  std::vector<Req> reqs;
  bool any_x = false;
  for (const auto& nm : names) {
    const auto it = std::find(canon.begin(), canon.end(), nm);
    if (it == canon.end()) throw InputError("trace has no variable '" + nm + "'");
    Req r{static_cast<std::size_t>(it - canon.begin()), nm, -1, 0, 0, 0};
    if (base_.has(nm)) {
      r.base_axis = static_cast<int>(base_.axis(nm));
      r.card = base_.vars()[static_cast<std::size_t>(r.base_axis)].card;
    } else {
      // X<i>_<j>
      const auto us = nm.find('_');
      r.i = std::stoi(nm.substr(1, us - 1)) - 1;
      r.j = std::stoi(nm.substr(us + 1)) - 1;
      r.card = x_card(r.i, r.j);
      any_x = true;
    }
    reqs.push_back(r);
  }
  if (!any_x) return wimwc::marginalize(base_, names);

  std::sort(reqs.begin(), reqs.end(), [](const Req& a, const Req& b) { return a.canon_pos < b.canon_pos; });
  if (std::adjacent_find(reqs.begin(), reqs.end(), [](const Req& a, const Req& b) {
        return a.canon_pos == b.canon_pos;
      }) != reqs.end())
    throw InputError("trace marginal: variable listed twice");

  std::vector<VarSpec> vars;
  std::vector<int> out_cards;
  for (const auto& r : reqs) {
    vars.push_back({r.name, r.card});
    out_cards.push_back(r.card);
  }
  std::vector<double> out(cell_count(vars), 0.0);
  const auto cards = base_.cards();
  std::vector<int> val(reqs.size());
  for (std::size_t cell = 0; cell < base_.size(); ++cell) {
    const double p = base_.probs()[cell];
    if (p <= 0.0) continue;
    const auto outcome = unravel(cell, cards);
    for (std::size_t q = 0; q < reqs.size(); ++q) {
      const auto& r = reqs[q];
      val[q] = r.base_axis >= 0 ? outcome[static_cast<std::size_t>(r.base_axis)]
                                : encode(code_, channels_, has_aux_, outcome, r.i, r.j);
    }
    out[ravel(val, out_cards)] += p;
  }
  return JointDist(std::move(vars), std::move(out));
}

JointDist TraceDist::materialize() const { return marginal(all_names()); }

// ---------------------------------------------------------------- checks

double memorylessness_gap(const TraceDist& trace) {
  const int k = trace.k();
  double worst = 0.0;
  NameSet past;
  for (int i = 0; i < k; ++i) past.push_back(w_name(i));
  for (int j = 0; j < trace.n(); ++j) {
    NameSet xs, outs;
    for (int i = 0; i < k; ++i) xs.push_back(x_name(i, j));
    for (int i = 0; i < k; ++i) outs.push_back(y_name(i, j));
    outs.push_back(z_name(j));
    if (trace.has_aux()) outs.push_back(t_name(j));
    NameSet all = past;
    all.insert(all.end(), xs.begin(), xs.end());
    all.insert(all.end(), outs.begin(), outs.end());
    const auto m = trace.marginal(all);
    worst = std::max(worst, cond_mutual_info(m, outs, past, xs));
    past.insert(past.end(), outs.begin(), outs.end());
  }
  return worst;
}

Lemma1Sides lemma1_sides(const TraceDist& trace, const fracpart::FractionalPartition& fp, Conditioning cond) {
  const int k = trace.k();
  if (k < 2) throw InputError("lemma1_sides: need at least two terminals");
  if (fp.k() != k) throw InputError("lemma1_sides: fractional partition is over a different number of terminals");
  fracpart::require_valid(fp);
  if (cond == Conditioning::kT && !trace.has_aux())
    throw InputError("lemma1_sides: conditioning on T requires a trace simulated with an auxiliary receiver");
  auto c_name = [&](int j) { return cond == Conditioning::kZ ? z_name(j) : t_name(j); };

  Lemma1Sides res;
  {
    Groups groups(static_cast<std::size_t>(k));
    Groups w_groups(static_cast<std::size_t>(k));
    NameSet cn;
    NameSet all;
    for (int i = 0; i < k; ++i) {
      groups[static_cast<std::size_t>(i)].push_back(w_name(i));
      w_groups[static_cast<std::size_t>(i)].push_back(w_name(i));
      for (int j = 0; j < trace.n(); ++j) groups[static_cast<std::size_t>(i)].push_back(y_name(i, j));
      all.insert(all.end(), groups[static_cast<std::size_t>(i)].begin(), groups[static_cast<std::size_t>(i)].end());
    }
    for (int j = 0; j < trace.n(); ++j) cn.push_back(c_name(j));
    all.insert(all.end(), cn.begin(), cn.end());
    const auto m = trace.marginal(all);
    res.w_dependence = i_lambda(m, w_groups, fp);
    res.lhs = i_lambda(m, groups, fp, cn) - res.w_dependence;
  }

  NameSet past_c;
  for (int j = 0; j < trace.n(); ++j) {
    Groups xy(static_cast<std::size_t>(k));
    Groups x(static_cast<std::size_t>(k));
    NameSet all;
    for (int i = 0; i < k; ++i) {
      x[static_cast<std::size_t>(i)] = {x_name(i, j)};
      xy[static_cast<std::size_t>(i)] = {x_name(i, j), y_name(i, j)};
      all.push_back(x_name(i, j));
      all.push_back(y_name(i, j));
    }
    all.push_back(c_name(j));
    all.insert(all.end(), past_c.begin(), past_c.end());
    const auto m = trace.marginal(all);
    NameSet now_c = past_c;
    now_c.push_back(c_name(j));
    const double term = i_lambda(m, xy, fp, now_c) - i_lambda(m, x, fp, past_c);
    res.rhs_terms.push_back(term);
    res.rhs += term;
    past_c = std::move(now_c);
  }
  return res;
}

}  // namespace wimwc::dbbound
