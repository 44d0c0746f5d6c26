#include "ruinlab/io.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ruinlab/errors.hpp"

namespace fs = std::filesystem;

namespace ruinlab {

namespace {

const char* const kEstimateHeader = "y,T,p_hat,ci_low,ci_high,n_paths,n_ruined,seed";
const char* const kBoundHeader = "y,alpha,bound,mc_estimate,mc_ci_hi";

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, path.string() + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, path.string() + ": write failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void corrupt(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::CorruptFile, path.string() + ": " + what);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const fs::path& path) {
  if (s.empty()) corrupt(path, "empty field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) corrupt(path, "bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const fs::path& path) {
  if (s.empty()) corrupt(path, "empty field");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) corrupt(path, "bad integer '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const fs::path& path) {
  if (s.empty() || s[0] == '-') corrupt(path, "bad unsigned integer '" + s + "'");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) corrupt(path, "bad unsigned integer '" + s + "'");
  return v;
}

// Rows of a CSV file with a fixed header; empty trailing lines ignored.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header, std::size_t cols) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header) corrupt(path, "unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != cols) corrupt(path, "expected " + std::to_string(cols) + " fields");
    rows.push_back(std::move(fields));
  }
  return rows;
}

Json num(double x) { return number_to_json(x); }

Json nums(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

// Typed access to report documents; any shape error becomes CorruptFile.
double get_num(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::CorruptFile, std::string("missing field '") + key + "'");
  try {
    return number_from_json(j.at(key), key);
  } catch (const Error&) {
    throw Error(ErrorCode::CorruptFile, std::string("field '") + key + "' is not a number");
  }
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("field '") + key + "': " + e.what());
  }
}

std::vector<double> get_nums(const Json& j, const char* key) {
  const Json& a = j.contains(key) ? j.at(key) : Json();
  if (!a.is_array()) throw Error(ErrorCode::CorruptFile, std::string("field '") + key + "' is not an array");
  std::vector<double> out;
  for (const Json& v : a) {
    try {
      out.push_back(number_from_json(v, key));
    } catch (const Error&) {
      throw Error(ErrorCode::CorruptFile, std::string("field '") + key + "' holds a non-number");
    }
  }
  return out;
}

Regime regime_from(const std::string& s) {
  for (Regime r : {Regime::Small, Regime::Middle, Regime::Large}) {
    if (s == to_string(r)) return r;
  }
  throw Error(ErrorCode::CorruptFile, "unknown regime '" + s + "'");
}

MomentSource source_from(const std::string& s) {
  for (MomentSource m : {MomentSource::ClosedForm, MomentSource::MonteCarlo, MomentSource::UpperBound,
                         MomentSource::Unavailable}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::CorruptFile, "unknown moment source '" + s + "'");
}

Verdict verdict_from(const std::string& s) {
  for (Verdict v : {Verdict::CertainRuin, Verdict::ConditionNotMet, Verdict::Inapplicable}) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorCode::CorruptFile, "unknown verdict '" + s + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

bool BoundRow::operator==(const BoundRow& o) const {
  return same(y, o.y) && same(alpha, o.alpha) && same(bound, o.bound) && same(mc_estimate, o.mc_estimate) &&
         same(mc_ci_hi, o.mc_ci_hi);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string compute_run_id(const std::string& command, const Config& config, const std::string& engine_version) {
  const std::string content = command + "\n" + to_json(config).dump() + "\n" + engine_version;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(content));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& command, const Config& config) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.engine_version = kEngineVersion;
  m.run_id = compute_run_id(command, config, m.engine_version);
  m.created_at = utc_timestamp();
  return m;
}

std::string estimates_csv(const std::vector<RuinEstimate>& estimates) {
  std::string out = std::string(kEstimateHeader) + "\n";
  for (const RuinEstimate& e : estimates) {
    out += format_number(e.y) + "," + format_number(e.horizon) + "," + format_number(e.p_hat) + "," +
           format_number(e.ci_low) + "," + format_number(e.ci_high) + "," + std::to_string(e.n_paths) + "," +
           std::to_string(e.n_ruined) + "," + std::to_string(e.seed) + "\n";
  }
  return out;
}

std::string bounds_csv(const std::vector<BoundRow>& rows) {
  std::string out = std::string(kBoundHeader) + "\n";
  for (const BoundRow& r : rows) {
    out += format_number(r.y) + "," + format_number(r.alpha) + "," + format_number(r.bound) + "," +
           format_number(r.mc_estimate) + "," + format_number(r.mc_ci_hi) + "\n";
  }
  return out;
}

std::vector<std::string> write_run(const RunManifest& manifest, const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / manifest.run_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, dir.string() + ": " + ec.message());

  Json doc;
  doc["schema"] = manifest.schema;
  doc["run_id"] = manifest.run_id;
  doc["command"] = manifest.command;
  doc["engine_version"] = manifest.engine_version;
  doc["created_at"] = manifest.created_at;
  doc["config"] = to_json(manifest.config);
  doc["overrides"] = manifest.config.overrides;
  doc["reports"] = manifest.reports;

  std::vector<std::string> written;
  const fs::path m = dir / "manifest.json";
  write_file(m, doc.dump(2) + "\n");
  written.push_back(m.string());
  if (!manifest.estimates.empty()) {
    const fs::path p = dir / "estimates.csv";
    write_file(p, estimates_csv(manifest.estimates));
    written.push_back(p.string());
  }
  if (!manifest.bounds.empty()) {
    const fs::path p = dir / "bounds.csv";
    write_file(p, bounds_csv(manifest.bounds));
    written.push_back(p.string());
  }
  return written;
}

RunManifest read_run(const std::string& dir_name) {
  const fs::path dir(dir_name);
  const fs::path mpath = dir / "manifest.json";
  Json doc;
  try {
    doc = Json::parse(read_file(mpath));
  } catch (const Json::parse_error& e) {
    corrupt(mpath, e.what());
  }
  if (!doc.is_object()) corrupt(mpath, "not an object");
  if (!doc.contains("schema") || doc["schema"] != kRunSchema) {
    throw Error(ErrorCode::SchemaMismatch, mpath.string() + ": expected schema " + kRunSchema);
  }
  RunManifest m;
  try {
    m.run_id = get<std::string>(doc, "run_id");
    m.command = get<std::string>(doc, "command");
    m.engine_version = get<std::string>(doc, "engine_version");
    m.created_at = get<std::string>(doc, "created_at");
    m.config = config_from_json(doc.at("config"));
    m.config.overrides = get<std::vector<std::string>>(doc, "overrides");
    m.reports = doc.contains("reports") ? doc["reports"] : Json::object();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptFile) throw;
    corrupt(mpath, e.what());
  } catch (const Json::exception& e) {
    corrupt(mpath, e.what());
  }
  if (compute_run_id(m.command, m.config, m.engine_version) != m.run_id) {
    throw Error(ErrorCode::SchemaMismatch, mpath.string() + ": run id does not match the manifest content");
  }

  const fs::path epath = dir / "estimates.csv";
  if (fs::exists(epath)) {
    for (const auto& f : read_csv(epath, kEstimateHeader, 8)) {
      RuinEstimate e;
      e.y = parse_double(f[0], epath);
      e.horizon = parse_double(f[1], epath);
      e.p_hat = parse_double(f[2], epath);
      e.ci_low = parse_double(f[3], epath);
      e.ci_high = parse_double(f[4], epath);
      e.n_paths = parse_int(f[5], epath);
      e.n_ruined = parse_int(f[6], epath);
      e.seed = parse_uint(f[7], epath);
      e.n_steps = m.config.spec.grid.n_steps;
      e.jump_adapted = m.config.spec.grid.jump_adapted;
      m.estimates.push_back(e);
    }
  }
  const fs::path bpath = dir / "bounds.csv";
  if (fs::exists(bpath)) {
    for (const auto& f : read_csv(bpath, kBoundHeader, 5)) {
      BoundRow r;
      r.y = parse_double(f[0], bpath);
      r.alpha = parse_double(f[1], bpath);
      r.bound = parse_double(f[2], bpath);
      r.mc_estimate = parse_double(f[3], bpath);
      r.mc_ci_hi = parse_double(f[4], bpath);
      m.bounds.push_back(r);
    }
  }
  return m;
}

std::string write_path_dump(const std::string& run_dir, std::uint64_t k, const SimulatedPath& path) {
  const fs::path dir = fs::path(run_dir) / "paths";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, dir.string() + ": " + ec.message());
  std::string out = "time,r_hat,stoch_exp,i_func";
  for (double a : path.alphas) out += ",j_" + format_number(a);
  out += ",disc_integral\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out += format_number(path.times[i]) + "," + format_number(path.r_hat[i]) + "," + format_number(path.stoch_exp[i]) +
           "," + format_number(path.i_func[i]);
    for (const auto& col : path.j_func) out += "," + format_number(col[i]);
    out += "," + (i < path.disc_integral.size() ? format_number(path.disc_integral[i]) : std::string("nan")) + "\n";
  }
  const fs::path p = dir / (std::to_string(k) + ".csv");
  write_file(p, out);
  return p.string();
}

// ---------------------------------------------------------------------------
// Report documents.

Json to_json(const RuinEstimate& e) {
  return Json{{"y", num(e.y)},           {"T", num(e.horizon)},           {"p_hat", num(e.p_hat)},
              {"ci_low", num(e.ci_low)}, {"ci_high", num(e.ci_high)},     {"n_paths", e.n_paths},
              {"n_ruined", e.n_ruined},  {"seed", e.seed},                {"n_steps", e.n_steps},
              {"jump_adapted", e.jump_adapted}};
}

RuinEstimate estimate_from_json(const Json& j) {
  RuinEstimate e;
  e.y = get_num(j, "y");
  e.horizon = get_num(j, "T");
  e.p_hat = get_num(j, "p_hat");
  e.ci_low = get_num(j, "ci_low");
  e.ci_high = get_num(j, "ci_high");
  e.n_paths = get<std::int64_t>(j, "n_paths");
  e.n_ruined = get<std::int64_t>(j, "n_ruined");
  e.seed = get<std::uint64_t>(j, "seed");
  e.n_steps = get<std::int64_t>(j, "n_steps");
  e.jump_adapted = get<bool>(j, "jump_adapted");
  return e;
}

Json to_json(const BetaValue& b) {
  return Json{{"known", b.known},
              {"value", num(b.value)},
              {"lower_bound", b.lower_bound},
              {"method", b.method},
              {"note", b.note}};
}

BetaValue beta_value_from_json(const Json& j) {
  BetaValue b;
  b.known = get<bool>(j, "known");
  b.value = get_num(j, "value");
  b.lower_bound = get<bool>(j, "lower_bound");
  b.method = get<std::string>(j, "method");
  b.note = get<std::string>(j, "note");
  return b;
}

Json to_json(const RootResult& r) {
  return Json{{"found", r.found},
              {"root", num(r.root)},
              {"reason", r.reason},
              {"slope_at_zero", num(r.slope_at_zero)},
              {"bracket_low", num(r.bracket_low)},
              {"bracket_high", num(r.bracket_high)},
              {"iterations", r.iterations},
              {"residual", num(r.residual)}};
}

RootResult root_result_from_json(const Json& j) {
  RootResult r;
  r.found = get<bool>(j, "found");
  r.root = get_num(j, "root");
  r.reason = get<std::string>(j, "reason");
  r.slope_at_zero = get_num(j, "slope_at_zero");
  r.bracket_low = get_num(j, "bracket_low");
  r.bracket_high = get_num(j, "bracket_high");
  r.iterations = get<int>(j, "iterations");
  r.residual = get_num(j, "residual");
  return r;
}

Json to_json(const BetaReport& r) {
  return Json{{"beta_T", to_json(r.beta_T)}, {"beta_inf", to_json(r.beta_inf)}, {"beta_inf_method", r.beta_inf_method}};
}

BetaReport beta_report_from_json(const Json& j) {
  BetaReport r;
  r.beta_T = beta_value_from_json(j.at("beta_T"));
  r.beta_inf = root_result_from_json(j.at("beta_inf"));
  r.beta_inf_method = get<std::string>(j, "beta_inf_method");
  return r;
}

Json to_json(const BoundConstants& c) {
  return Json{{"alpha", num(c.alpha)},
              {"regime", to_string(c.regime)},
              {"C1", num(c.c1)},
              {"C2", num(c.c2)},
              {"C3", num(c.c3)},
              {"tail_integral", num(c.tail_integral)},
              {"prefactor_restored", c.prefactor_restored}};
}

BoundConstants bound_constants_from_json(const Json& j) {
  BoundConstants c;
  c.alpha = get_num(j, "alpha");
  c.regime = regime_from(get<std::string>(j, "regime"));
  c.c1 = get_num(j, "C1");
  c.c2 = get_num(j, "C2");
  c.c3 = get_num(j, "C3");
  c.tail_integral = get_num(j, "tail_integral");
  c.prefactor_restored = get<bool>(j, "prefactor_restored");
  return c;
}

Json to_json(const Moment& m) {
  return Json{{"value", num(m.value)}, {"std_err", num(m.std_err)}, {"source", to_string(m.source)}, {"n", m.n},
              {"note", m.note}};
}

Moment moment_from_json(const Json& j) {
  Moment m;
  m.value = get_num(j, "value");
  m.std_err = get_num(j, "std_err");
  m.source = source_from(get<std::string>(j, "source"));
  m.n = get<std::int64_t>(j, "n");
  m.note = get<std::string>(j, "note");
  return m;
}

Json to_json(const MomentSet& m) {
  return Json{{"alpha", num(m.alpha)},
              {"horizon", num(m.horizon)},
              {"E_I_alpha", to_json(m.e_i_alpha)},
              {"E_J_half", to_json(m.e_j_half)},
              {"E_J_alpha", to_json(m.e_j_alpha)}};
}

MomentSet moment_set_from_json(const Json& j) {
  MomentSet m;
  m.alpha = get_num(j, "alpha");
  m.horizon = get_num(j, "horizon");
  m.e_i_alpha = moment_from_json(j.at("E_I_alpha"));
  m.e_j_half = moment_from_json(j.at("E_J_half"));
  m.e_j_alpha = moment_from_json(j.at("E_J_alpha"));
  return m;
}

Json to_json(const NovikovConstants& k) {
  return Json{{"K1", num(k.k1)}, {"K2", num(k.k2)}, {"K3", num(k.k3)}, {"user", k.user}};
}

NovikovConstants novikov_from_json(const Json& j) {
  NovikovConstants k;
  k.k1 = get_num(j, "K1");
  k.k2 = get_num(j, "K2");
  k.k3 = get_num(j, "K3");
  k.user = get<bool>(j, "user");
  return k;
}

Json to_json(const BoundReport& r) {
  return Json{{"constants", to_json(r.constants)},
              {"moments", to_json(r.moments)},
              {"novikov", to_json(r.novikov)},
              {"beta", to_json(r.beta)},
              {"alpha_below_beta", r.alpha_below_beta},
              {"tail_integral_finite", r.tail_integral_finite},
              {"warnings", r.warnings}};
}

BoundReport bound_report_from_json(const Json& j) {
  BoundReport r;
  try {
    r.constants = bound_constants_from_json(j.at("constants"));
    r.moments = moment_set_from_json(j.at("moments"));
    r.novikov = novikov_from_json(j.at("novikov"));
    r.beta = beta_value_from_json(j.at("beta"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptFile, e.what());
  }
  r.alpha_below_beta = get<bool>(j, "alpha_below_beta");
  r.tail_integral_finite = get<bool>(j, "tail_integral_finite");
  r.warnings = get<std::vector<std::string>>(j, "warnings");
  return r;
}

Json to_json(const CertainRuinReport& r) {
  return Json{{"verdict", to_string(r.verdict)},
              {"D", num(r.drift_limit)},
              {"p", num(r.p_used)},
              {"cond_i", r.cond_i},
              {"cond_ii", r.cond_ii},
              {"cond_iii", r.cond_iii},
              {"integral_i", num(r.integral_i)},
              {"integral_ii", num(r.integral_ii)},
              {"time_average", num(r.time_average)},
              {"method", r.method},
              {"note", r.note}};
}

CertainRuinReport certain_ruin_from_json(const Json& j) {
  CertainRuinReport r;
  r.verdict = verdict_from(get<std::string>(j, "verdict"));
  r.drift_limit = get_num(j, "D");
  r.p_used = get_num(j, "p");
  r.cond_i = get<bool>(j, "cond_i");
  r.cond_ii = get<bool>(j, "cond_ii");
  r.cond_iii = get<bool>(j, "cond_iii");
  r.integral_i = get_num(j, "integral_i");
  r.integral_ii = get_num(j, "integral_ii");
  r.time_average = get_num(j, "time_average");
  r.method = get<std::string>(j, "method");
  r.note = get<std::string>(j, "note");
  return r;
}

Json to_json(const SlopeFit& f) {
  return Json{{"y", nums(f.y)},
              {"log_p", nums(f.log_p)},
              {"used", f.used},
              {"slope", num(f.slope)},
              {"intercept", num(f.intercept)},
              {"slope_std_err", num(f.slope_std_err)},
              {"beta_ref", num(f.beta_ref)},
              {"gap", num(f.gap)},
              {"floor", f.floor}};
}

SlopeFit slope_fit_from_json(const Json& j) {
  SlopeFit f;
  f.y = get_nums(j, "y");
  f.log_p = get_nums(j, "log_p");
  f.used = get<std::vector<bool>>(j, "used");
  f.slope = get_num(j, "slope");
  f.intercept = get_num(j, "intercept");
  f.slope_std_err = get_num(j, "slope_std_err");
  f.beta_ref = get_num(j, "beta_ref");
  f.gap = get_num(j, "gap");
  f.floor = get<std::int64_t>(j, "floor");
  return f;
}

Json to_json(const BiasProbe& p) {
  return Json{{"y", nums(p.y)},
              {"p_coarse", nums(p.p_coarse)},
              {"p_fine", nums(p.p_fine)},
              {"delta", nums(p.delta)},
              {"n_steps_coarse", p.n_steps_coarse},
              {"n_steps_fine", p.n_steps_fine}};
}

BiasProbe bias_probe_from_json(const Json& j) {
  BiasProbe p;
  p.y = get_nums(j, "y");
  p.p_coarse = get_nums(j, "p_coarse");
  p.p_fine = get_nums(j, "p_fine");
  p.delta = get_nums(j, "delta");
  p.n_steps_coarse = get<std::int64_t>(j, "n_steps_coarse");
  p.n_steps_fine = get<std::int64_t>(j, "n_steps_fine");
  return p;
}

}  // namespace ruinlab
