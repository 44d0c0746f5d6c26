#include "ruinlab/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void bad(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::InvalidSpec, key + ": " + msg);
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    if (!j_.contains(key)) bad(join(path_, key), "missing");
    seen_.insert(key);
    return j_.at(key);
  }

  double num(const std::string& key) { return number_from_json(at(key), join(path_, key)); }
  double num(const std::string& key, double def) { return has(key) ? num(key) : def; }

  std::int64_t integer(const std::string& key) {
    const Json& v = at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9.0e18) return static_cast<std::int64_t>(d);
    }
    bad(join(path_, key), "expected an integer");
  }
  std::int64_t integer(const std::string& key, std::int64_t def) { return has(key) ? integer(key) : def; }

  std::uint64_t unsigned_integer(const std::string& key) {
    const Json& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    bad(join(path_, key), "expected a non-negative integer");
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = at(key);
    if (!v.is_boolean()) bad(join(path_, key), "expected true or false");
    return v.get<bool>();
  }

  std::string str(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) bad(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = at(key);
    const std::string k = join(path_, key);
    if (!v.is_array()) bad(k, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_from_json(v[i], k + "[" + std::to_string(i) + "]"));
    return out;
  }

  Reader sub(const std::string& key) { return Reader(at(key), join(path_, key)); }
  const std::string& path() const { return path_; }

  void done() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) bad(join(path_, item.key()), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

JumpSize size_from(Reader r) {
  const std::string type = r.str("type");
  JumpSize out;
  if (type == "exponential") {
    out = ExponentialJumps{r.num("rate")};
  } else if (type == "double_exponential") {
    DoubleExponentialJumps d;
    d.p_up = r.num("p_up");
    d.rate_up = r.num("rate_up", d.rate_up);
    d.rate_down = r.num("rate_down", d.rate_down);
    out = d;
  } else if (type == "gaussian") {
    out = GaussianJumps{r.num("mean"), r.num("sd")};
  } else if (type == "point_mass") {
    out = PointMassJumps{r.num("value")};
  } else {
    bad(join(r.path(), "type"), "unknown jump size law '" + type + "'");
  }
  r.done();
  return out;
}

JumpFamily jumps_from(Reader r) {
  const std::string type = r.str("type");
  JumpFamily out;
  if (type == "none") {
    out = NoJumps{};
  } else if (type == "compound_poisson") {
    CompoundPoissonJumps cp;
    cp.rate = r.num("rate");
    cp.size = size_from(r.sub("size"));
    out = cp;
  } else if (type == "tempered_stable") {
    TemperedStableJumps ts;
    ts.c_neg = r.num("c_neg");
    ts.c_pos = r.num("c_pos");
    ts.lambda_neg = r.num("lambda_neg");
    ts.lambda_pos = r.num("lambda_pos");
    ts.alpha_neg = r.num("alpha_neg");
    ts.alpha_pos = r.num("alpha_pos");
    out = ts;
  } else {
    bad(join(r.path(), "type"), "unknown jump family '" + type + "'");
  }
  r.done();
  return out;
}

JumpFamily optional_jumps(Reader& r) { return r.has("jumps") ? jumps_from(r.sub("jumps")) : JumpFamily{NoJumps{}}; }

BusinessSpec business_from(Reader r) {
  BusinessSpec b;
  b.drift = r.num("drift");
  b.sigma = r.num("sigma");
  b.jumps = optional_jumps(r);
  r.done();
  return b;
}

ReturnSpec returns_from(Reader r) {
  const std::string type = r.str("type");
  ReturnSpec out;
  if (type == "black_scholes") {
    out = BlackScholesReturns{r.num("drift"), r.num("sigma")};
  } else if (type == "levy") {
    LevyReturns l;
    l.drift = r.num("drift");
    l.sigma = r.num("sigma");
    l.jumps = optional_jumps(r);
    out = l;
  } else if (type == "hat") {
    HatReturns h;
    h.drift = r.num("drift");
    h.sigma = r.num("sigma");
    h.jumps = optional_jumps(r);
    h.cutoff = r.num("cutoff", h.cutoff);
    out = h;
  } else if (type == "additive") {
    AdditiveReturns a;
    Reader w = r.sub("weight");
    a.weight.knots = w.numbers("knots");
    a.weight.values = w.numbers("values");
    w.done();
    a.drift = r.num("drift");
    a.sigma = r.num("sigma");
    a.jumps = optional_jumps(r);
    out = a;
  } else {
    bad(join(r.path(), "type"), "unknown return family '" + type + "'");
  }
  r.done();
  return out;
}

ExperimentSpec spec_from_reader(Reader& root) {
  ExperimentSpec spec;
  spec.business = business_from(root.sub("business"));
  spec.returns = returns_from(root.sub("returns"));
  {
    Reader g = root.sub("grid");
    spec.grid.horizon = g.num("T");
    spec.grid.n_steps = g.integer("n_steps");
    spec.grid.jump_adapted = g.flag("jump_adapted", spec.grid.jump_adapted);
    g.done();
  }
  {
    Reader mc = root.sub("mc");
    spec.n_paths = mc.integer("n_paths");
    if (mc.has("seed")) spec.seed = mc.unsigned_integer("seed");
    mc.done();
  }
  spec.capitals = root.numbers("capitals");
  if (root.has("alphas")) spec.alphas = root.numbers("alphas");
  return spec;
}

Json size_json(const JumpSize& size) {
  return std::visit(overloaded{
                        [](const ExponentialJumps& e) { return Json{{"type", "exponential"}, {"rate", e.rate}}; },
                        [](const DoubleExponentialJumps& d) {
                          return Json{{"type", "double_exponential"},
                                      {"p_up", d.p_up},
                                      {"rate_up", d.rate_up},
                                      {"rate_down", d.rate_down}};
                        },
                        [](const GaussianJumps& g) { return Json{{"type", "gaussian"}, {"mean", g.mean}, {"sd", g.sd}}; },
                        [](const PointMassJumps& p) { return Json{{"type", "point_mass"}, {"value", p.value}}; },
                    },
                    size);
}

Json numbers_json(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_to_json(x));
  return a;
}

}  // namespace

Json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  bad(key, "expected a number");
}

Json to_json(const JumpSize& size) { return size_json(size); }

Json to_json(const JumpFamily& jumps) {
  return std::visit(overloaded{
                        [](const NoJumps&) { return Json{{"type", "none"}}; },
                        [](const CompoundPoissonJumps& cp) {
                          return Json{{"type", "compound_poisson"}, {"rate", cp.rate}, {"size", size_json(cp.size)}};
                        },
                        [](const TemperedStableJumps& ts) {
                          return Json{{"type", "tempered_stable"}, {"c_neg", ts.c_neg},         {"c_pos", ts.c_pos},
                                      {"lambda_neg", ts.lambda_neg}, {"lambda_pos", ts.lambda_pos},
                                      {"alpha_neg", ts.alpha_neg},   {"alpha_pos", ts.alpha_pos}};
                        },
                    },
                    jumps);
}

Json to_json(const BusinessSpec& b) { return Json{{"drift", b.drift}, {"sigma", b.sigma}, {"jumps", to_json(b.jumps)}}; }

Json to_json(const ReturnSpec& returns) {
  return std::visit(overloaded{
                        [](const BlackScholesReturns& r) {
                          return Json{{"type", "black_scholes"}, {"drift", r.drift}, {"sigma", r.sigma}};
                        },
                        [](const LevyReturns& r) {
                          return Json{{"type", "levy"}, {"drift", r.drift}, {"sigma", r.sigma}, {"jumps", to_json(r.jumps)}};
                        },
                        [](const HatReturns& r) {
                          return Json{{"type", "hat"},
                                      {"drift", r.drift},
                                      {"sigma", r.sigma},
                                      {"jumps", to_json(r.jumps)},
                                      {"cutoff", r.cutoff}};
                        },
                        [](const AdditiveReturns& r) {
                          return Json{{"type", "additive"},
                                      {"weight", {{"knots", numbers_json(r.weight.knots)},
                                                  {"values", numbers_json(r.weight.values)}}},
                                      {"drift", r.drift},
                                      {"sigma", r.sigma},
                                      {"jumps", to_json(r.jumps)}};
                        },
                    },
                    returns);
}

Json to_json(const ExperimentSpec& spec) {
  return Json{{"business", to_json(spec.business)},
              {"returns", to_json(spec.returns)},
              {"grid", {{"T", spec.grid.horizon}, {"n_steps", spec.grid.n_steps}, {"jump_adapted", spec.grid.jump_adapted}}},
              {"mc", {{"n_paths", spec.n_paths}, {"seed", spec.seed}}},
              {"capitals", numbers_json(spec.capitals)},
              {"alphas", numbers_json(spec.alphas)}};
}

Json to_json(const Config& c) {
  Json j = to_json(c.spec);
  if (c.novikov.user) j["novikov"] = {{"K1", c.novikov.k1}, {"K2", c.novikov.k2}, {"K3", c.novikov.k3}};
  Json certain = {{"horizons", numbers_json(c.certain.horizons)},
                  {"p", c.certain.p},
                  {"s_horizon", c.certain.s_horizon},
                  {"analytic_tail", c.certain.analytic_tail}};
  if (c.certain.y) certain["y"] = *c.certain.y;
  j["certain"] = certain;
  j["bound"] = {{"horizon", c.bound.infinite_horizon ? "infinite" : "finite"},
                {"moments", c.bound.moments == MomentMode::ClosedForm ? "closed_form" : "monte_carlo"}};
  Json slope = {{"floor", c.slope.floor}};
  if (c.slope.beta_ref) slope["beta_ref"] = number_to_json(*c.slope.beta_ref);
  j["slope"] = slope;
  return j;
}

ExperimentSpec spec_from_json(const Json& doc) {
  Reader root(doc, "");
  ExperimentSpec spec = spec_from_reader(root);
  root.done();
  return spec;
}

Config config_from_json(const Json& doc) {
  Reader root(doc, "");
  Config c;
  c.spec = spec_from_reader(root);
  if (root.has("novikov")) {
    Reader k = root.sub("novikov");
    c.novikov.k1 = k.num("K1", c.novikov.k1);
    c.novikov.k2 = k.num("K2", c.novikov.k2);
    c.novikov.k3 = k.num("K3", c.novikov.k3);
    c.novikov.user = true;
    k.done();
  }
  if (root.has("certain")) {
    Reader r = root.sub("certain");
    if (r.has("y")) c.certain.y = r.num("y");
    if (r.has("horizons")) c.certain.horizons = r.numbers("horizons");
    c.certain.p = r.num("p", c.certain.p);
    c.certain.s_horizon = r.num("s_horizon", c.certain.s_horizon);
    c.certain.analytic_tail = r.flag("analytic_tail", c.certain.analytic_tail);
    r.done();
  }
  if (root.has("bound")) {
    Reader r = root.sub("bound");
    if (r.has("horizon")) {
      const std::string h = r.str("horizon");
      if (h != "finite" && h != "infinite") bad("bound.horizon", "expected 'finite' or 'infinite'");
      c.bound.infinite_horizon = h == "infinite";
    }
    if (r.has("moments")) {
      const std::string m = r.str("moments");
      if (m != "closed_form" && m != "monte_carlo") bad("bound.moments", "expected 'closed_form' or 'monte_carlo'");
      c.bound.moments = m == "closed_form" ? MomentMode::ClosedForm : MomentMode::MonteCarlo;
    }
    r.done();
  }
  if (root.has("slope")) {
    Reader r = root.sub("slope");
    if (r.has("beta_ref")) c.slope.beta_ref = r.num("beta_ref");
    c.slope.floor = r.integer("floor", c.slope.floor);
    r.done();
  }
  root.done();
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::CorruptFile, path + ": " + e.what());
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad(assignment, "--set expects key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) bad(key, "empty path component");
    if (node->is_null()) *node = Json::object();
    if (!node->is_object()) bad(key, "cannot descend into a non-object");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

}  // namespace ruinlab
