#include "wimwc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wimwc::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw InputError(where.empty() ? msg : "field '" + where + "': " + msg);
}

std::string sub(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(sub(where, key), "missing");
  return *it;
}

const json* optional_member(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < -(1LL << 30) || v > (1LL << 30)) fail(where, "integer out of range");
  return static_cast<int>(v);
}

double get_real(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "not finite");
  return v;
}

const json& get_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

std::vector<VarSpec> read_vars(const json& j, const std::string& where) {
  std::vector<VarSpec> out;
  const auto& arr = get_array(j, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto w = at(where, i);
    const auto& name = member(arr[i], "name", w);
    if (!name.is_string()) fail(sub(w, "name"), "expected a string");
    const int card = get_int(member(arr[i], "card", w), sub(w, "card"));
    if (card < 1) fail(sub(w, "card"), "cardinality must be at least 1");
    out.push_back({name.get<std::string>(), card});
  }
  return out;
}

void flatten(const json& j, std::span<const int> dims, const std::string& where, std::vector<double>& out) {
  if (dims.empty()) {
    const double v = get_real(j, where);
    if (v < -kClampTol) fail(where, "negative probability");
    out.push_back(std::max(v, 0.0));
    return;
  }
  if (!j.is_array()) fail(where, "expected an array of length " + std::to_string(dims[0]));
  if (j.size() != static_cast<std::size_t>(dims[0]))
    fail(where, "expected length " + std::to_string(dims[0]) + ", got " + std::to_string(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], dims.subspan(1), at(where, i), out);
}

std::vector<double> read_probs(const json& j, const std::vector<VarSpec>& vars, const std::string& where) {
  std::vector<int> dims;
  for (const auto& v : vars) dims.push_back(v.card);
  std::vector<double> out;
  out.reserve(cell_count(vars));
  // A scalar is accepted for an empty variable list.
  flatten(j, dims, where, out);
  return out;
}

void normalize_block(std::span<double> block, const std::string& where, const std::string& what) {
  double s = 0.0;
  for (double v : block) s += v;
  if (std::abs(s - 1.0) > kLoadTol) {
    std::ostringstream os;
    os.precision(12);
    os << what << " sums to " << s << ", off by more than 1e-6";
    fail(where, os.str());
  }
  for (auto& v : block) v /= s;
}

JointDist dist_from(const json& j, const std::string& where) {
  auto vars = read_vars(member(j, "vars", where), sub(where, "vars"));
  try {
    (void)cell_count(vars);
  } catch (const SizeError&) {
    fail(sub(where, "vars"), "state space exceeds 2^24 cells");
  }
  auto probs = read_probs(member(j, "probs", where), vars, sub(where, "probs"));
  normalize_block(probs, sub(where, "probs"), "distribution");
  try {
    return JointDist(std::move(vars), std::move(probs));
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

Channel channel_from(const json& j, const std::string& where) {
  auto in = read_vars(member(j, "in_vars", where), sub(where, "in_vars"));
  auto out = read_vars(member(j, "out_vars", where), sub(where, "out_vars"));
  std::vector<VarSpec> all = in;
  all.insert(all.end(), out.begin(), out.end());
  std::size_t in_size = 1, out_size = 1;
  try {
    (void)cell_count(all);
    in_size = cell_count(in);
    out_size = cell_count(out);
  } catch (const SizeError&) {
    fail(where, "channel tensor exceeds 2^24 cells");
  }
  auto probs = read_probs(member(j, "probs", where), all, sub(where, "probs"));
  for (std::size_t r = 0; r < in_size; ++r)
    normalize_block(std::span<double>(probs).subspan(r * out_size, out_size), sub(where, "probs"),
                    "row " + std::to_string(r));
  try {
    return Channel(std::move(in), std::move(out), std::move(probs));
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

fracpart::FractionalPartition lambda_from(const json& j, const std::string& where) {
  const int k = get_int(member(j, "k", where), sub(where, "k"));
  if (k < 2 || k > fracpart::kMaxK) fail(sub(where, "k"), "k must lie in [2, 16]");
  fracpart::FractionalPartition fp(k);
  const auto& ws = get_array(member(j, "weights", where), sub(where, "weights"));
  for (std::size_t e = 0; e < ws.size(); ++e) {
    const auto w = at(sub(where, "weights"), e);
    const auto& s = get_array(member(ws[e], "subset", w), sub(w, "subset"));
    fracpart::Subset b = 0;
    for (std::size_t m = 0; m < s.size(); ++m) {
      const int i = get_int(s[m], at(sub(w, "subset"), m));
      if (i < 1 || i > k) fail(at(sub(w, "subset"), m), "index out of range 1..k");
      const auto bit = fracpart::Subset{1} << (i - 1);
      if (b & bit) fail(at(sub(w, "subset"), m), "repeated index");
      b |= bit;
    }
    if (fp.weight(b) != 0.0) fail(sub(w, "subset"), "subset listed twice");
    const double v = get_real(member(ws[e], "w", w), sub(w, "w"));
    if (b == 0 || b == fracpart::full_set(k)) fail(sub(w, "subset"), "subset must be nonempty and proper");
    fp.set(b, v);
  }
  const auto rep = fracpart::validate(fp);
  if (!rep.ok) fail(where, rep.message);
  return fp;
}

json vars_json(const std::vector<VarSpec>& vars) {
  json a = json::array();
  for (const auto& v : vars) a.push_back({{"name", v.name}, {"card", v.card}});
  return a;
}

json nest(std::span<const double> flat, std::span<const int> dims) {
  if (dims.empty()) return flat[0];
  json a = json::array();
  const std::size_t stride = flat.size() / static_cast<std::size_t>(dims[0]);
  for (int i = 0; i < dims[0]; ++i)
    a.push_back(nest(flat.subspan(static_cast<std::size_t>(i) * stride, stride), dims.subspan(1)));
  return a;
}

json dist_j(const JointDist& d) {
  const auto cards = d.cards();
  return {{"vars", vars_json(d.vars())}, {"probs", nest(d.probs(), cards)}};
}

json channel_j(const Channel& ch) {
  std::vector<int> dims;
  for (const auto& v : ch.in_vars()) dims.push_back(v.card);
  for (const auto& v : ch.out_vars()) dims.push_back(v.card);
  return {{"in_vars", vars_json(ch.in_vars())}, {"out_vars", vars_json(ch.out_vars())}, {"probs", nest(ch.probs(), dims)}};
}

json lambda_j(const fracpart::FractionalPartition& fp) {
  json ws = json::array();
  for (const auto& [b, w] : fp.support()) {
    json s = json::array();
    for (int i = 0; i < fp.k(); ++i)
      if (b & (fracpart::Subset{1} << i)) s.push_back(i + 1);
    ws.push_back({{"subset", s}, {"w", w}});
  }
  return {{"k", fp.k()}, {"weights", ws}};
}

json v_result_j(const keybound::VResult& v) {
  return {{"value", v.value}, {"px", v.px},           {"puv", v.puv},
          {"card_u", v.card_u}, {"card_v", v.card_v}, {"converged", v.converged},
          {"evaluations", v.evaluations}};
}

json lemma_j(const dbbound::Lemma1Sides& s) {
  return {{"lhs", s.lhs}, {"rhs", s.rhs}, {"holds", s.lhs <= s.rhs + 1e-9}, {"w_dependence", s.w_dependence},
          {"rhs_terms", s.rhs_terms}};
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot write file");
  out << contents;
  if (!out) throw InputError(path + ": write failed");
}

JointDist parse_dist(std::string_view text) { return dist_from(parse_text(text), ""); }

Channel parse_channel(std::string_view text) { return channel_from(parse_text(text), ""); }

fracpart::FractionalPartition parse_lambda(std::string_view text) { return lambda_from(parse_text(text), ""); }

fracpart::FractionalPartition lambda_from_arg(const std::string& arg, int k) {
  if (arg == "uniform-km1") return fracpart::preset_uniform_km1(k);
  if (arg.rfind("partition:", 0) == 0) return fracpart::preset_partition(fracpart::parse_partition(k, arg.substr(10)));
  auto fp = load(arg, parse_lambda);
  if (fp.k() != k) throw InputError(arg + ": lambda has k = " + std::to_string(fp.k()) + ", expected " + std::to_string(k));
  return fp;
}

CodeSpec parse_code(std::string_view text) {
  const json j = parse_text(text);
  CodeSpec spec;
  auto& code = spec.code;
  code.k = get_int(member(j, "k", ""), "k");
  code.n = get_int(member(j, "n", ""), "n");
  if (code.k < 2) fail("k", "k must be at least 2");
  if (code.n < 1) fail("n", "n must be at least 1");

  const auto& chans = get_array(member(j, "channels", ""), "channels");
  for (std::size_t c = 0; c < chans.size(); ++c) spec.channels.push_back(channel_from(chans[c], at("channels", c)));
  if (const json* a = optional_member(j, "aux")) spec.aux = channel_from(*a, "aux");

  const json* wd = optional_member(j, "w_dists");
  const json* wc = optional_member(j, "w_cards");
  if ((wd == nullptr) == (wc == nullptr)) fail("", "exactly one of 'w_cards' and 'w_dists' is required");
  if (wc) {
    const auto& arr = get_array(*wc, "w_cards");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const int c = get_int(arr[i], at("w_cards", i));
      if (c < 1) fail(at("w_cards", i), "cardinality must be at least 1");
      code.w_dists.emplace_back(static_cast<std::size_t>(c), 1.0 / c);
    }
  } else {
    const auto& arr = get_array(*wd, "w_dists");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& row = get_array(arr[i], at("w_dists", i));
      std::vector<double> p;
      for (std::size_t m = 0; m < row.size(); ++m) {
        const double v = get_real(row[m], at(at("w_dists", i), m));
        if (v < 0.0) fail(at(at("w_dists", i), m), "negative probability");
        p.push_back(v);
      }
      if (p.empty()) fail(at("w_dists", i), "empty distribution");
      normalize_block(p, at("w_dists", i), "distribution");
      code.w_dists.push_back(std::move(p));
    }
  }

  const auto& sched = get_array(member(j, "schedule", ""), "schedule");
  for (std::size_t s = 0; s < sched.size(); ++s) code.schedule.push_back(get_int(sched[s], at("schedule", s)));

  const auto& enc = get_array(member(j, "encoders", ""), "encoders");
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const auto& steps = get_array(enc[i], at("encoders", i));
    std::vector<std::vector<int>> tables;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const auto w = at(at("encoders", i), s);
      const auto& t = get_array(steps[s], w);
      std::vector<int> table;
      for (std::size_t e = 0; e < t.size(); ++e) table.push_back(get_int(t[e], at(w, e)));
      tables.push_back(std::move(table));
    }
    code.encoders.push_back(std::move(tables));
  }
  return spec;
}

keybound::WiMWCSystem parse_system(std::string_view text) {
  const json j = parse_text(text);
  const int k = get_int(member(j, "k", ""), "k");
  const int r = get_int(member(j, "r", ""), "r");
  keybound::WiMWCSystem sys{k, r, channel_from(member(j, "main", ""), "main"), {}};
  if (const json* p = optional_member(j, "parallels")) {
    const auto& arr = get_array(*p, "parallels");
    for (std::size_t l = 0; l < arr.size(); ++l) {
      const auto w = at("parallels", l);
      const double alpha = get_real(member(arr[l], "alpha", w), sub(w, "alpha"));
      if (alpha < 0.0) fail(sub(w, "alpha"), "rate must be nonnegative");
      sys.parallels.push_back({channel_from(member(arr[l], "channel", w), sub(w, "channel")), alpha});
    }
  }
  keybound::check_system(sys);
  return sys;
}

macregion::GenFeedbackMAC parse_mac(std::string_view text) {
  return macregion::GenFeedbackMAC(channel_from(parse_text(text), ""));
}

std::string dist_json(const JointDist& d) { return dist_j(d).dump(2); }
std::string channel_json(const Channel& ch) { return channel_j(ch).dump(2); }
std::string lambda_json(const fracpart::FractionalPartition& fp) { return lambda_j(fp).dump(2); }

std::string system_json(const keybound::WiMWCSystem& sys) {
  json par = json::array();
  for (const auto& p : sys.parallels) par.push_back({{"channel", channel_j(p.channel)}, {"alpha", p.alpha}});
  return json{{"k", sys.k}, {"r", sys.r}, {"main", channel_j(sys.main)}, {"parallels", par}}.dump(2);
}

std::string code_json(const CodeSpec& spec) {
  json chans = json::array();
  for (const auto& c : spec.channels) chans.push_back(channel_j(c));
  json j{{"k", spec.code.k},
         {"n", spec.code.n},
         {"w_dists", spec.code.w_dists},
         {"encoders", spec.code.encoders},
         {"schedule", spec.code.schedule},
         {"channels", chans}};
  if (spec.aux) j["aux"] = channel_j(*spec.aux);
  return j.dump(2);
}

std::string bound_report_json(const keybound::BoundReport& rep) {
  json per = json::array();
  for (const auto& c : rep.per_channel) per.push_back({{"id", c.id}, {"alpha", c.alpha}, {"v", v_result_j(c.v)}});
  return json{{"value", rep.value},
              {"mode", rep.mode == keybound::Mode::kGrid ? "grid" : "heuristic"},
              {"certified", rep.certified},
              {"per_channel", per}}
      .dump(2);
}

std::string lemma1_json(const dbbound::Lemma1Sides& z, const std::optional<dbbound::Lemma1Sides>& t,
                        double memorylessness_gap) {
  json j{{"conditioning_z", lemma_j(z)}, {"memorylessness_gap", memorylessness_gap}};
  if (t) j["conditioning_t"] = lemma_j(*t);
  return j.dump(2);
}

std::string region_json(const macregion::OuterRegion& reg, const macregion::SumRateResult& sum) {
  json verts = json::array();
  for (const auto& [x, y] : reg.vertices) verts.push_back({x, y});
  json wit = json::array();
  for (const auto& w : reg.witnesses) wit.push_back(dist_j(w));
  const auto& r = sum.rates;
  return json{{"vertices", verts},
              {"sum_rate_max", reg.sum_rate_max},
              {"certified", reg.certified},
              {"sum_rate",
               {{"value", sum.value},
                {"certified", sum.certified},
                {"witness", dist_j(sum.witness)},
                {"terms",
                 {{"r1", r.r1},
                  {"r2", r.r2},
                  {"sum_full", r.sum_full},
                  {"sum_y", r.sum_y},
                  {"slack_6a", r.slack_6a},
                  {"slack_6b", r.slack_6b}}}}},
              {"witnesses", wit}}
      .dump(2);
}

std::string region_csv(const macregion::OuterRegion& reg) {
  std::ostringstream os;
  os.precision(17);
  os << "R1,R2\n";
  for (const auto& [x, y] : reg.vertices) os << x << "," << y << "\n";
  return os.str();
}

std::string_view schema_help() {
  return R"(File formats (JSON):

  distribution  {"vars": [{"name": "X1", "card": 2}, ...],
                 "probs": nested arrays, first variable outermost}
  channel       {"in_vars": [...], "out_vars": [...],
                 "probs": nested arrays over in_vars then out_vars}
                Totals and channel rows within 1e-6 of 1 are renormalized.
  lambda        {"k": 3, "weights": [{"subset": [1, 2], "w": 0.5}, ...]}
                or a preset: uniform-km1, partition:1,2|3
  system        {"k": 2, "r": 2, "main": channel,
                 "parallels": [{"channel": channel, "alpha": 1.0}, ...]}
                Channels read X1..Xk and emit Y1..Yk, Z.
  aux receiver  channel reading X1..Xk, Y1..Yk, Z and emitting one variable.
  code          {"k": 2, "n": 2, "w_cards": [2, 2] or "w_dists": [[...], ...],
                 "channels": [channel, ...], "schedule": [0, 0],
                 "encoders": [[table for step 1, table for step 2], ...],
                 "aux": channel (optional)}
                The table of terminal i at step j is indexed row-major by
                (w_i, y_i1, ..., y_i(j-1)) and holds input symbols.
  mac           channel with in_vars X1, X2 and out_vars Y, YF1, YF2.
)";
}

}  // namespace wimwc::io
