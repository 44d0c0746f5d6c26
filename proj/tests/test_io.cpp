#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/io.hpp"

using namespace ruinlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("ruinlab_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no Error thrown");
  return ErrorCode::InvalidSpec;
}

Config sample_config() {
  Config c;
  c.spec.business = BusinessSpec{-0.1, 0.2, CompoundPoissonJumps{1.5, DoubleExponentialJumps{0.3, 2.0, 4.0}}};
  c.spec.returns = HatReturns{0.1, 0.2, TemperedStableJumps{1, 1, 3, 1, 0.5, 0.5}, 1e-3};
  c.spec.grid = GridSpec{2.0, 300, true};
  c.spec.capitals = {1, 2.5, 10};
  c.spec.n_paths = 123;
  c.spec.seed = 99;
  c.spec.alphas = {0.5, 1.5};
  c.slope.floor = 20;
  c.overrides = {"mc.n_paths=123"};
  return c;
}

RunManifest sample_manifest() {
  RunManifest m = make_manifest("simulate", sample_config());
  const GridSpec g = m.config.spec.grid;
  m.estimates = {make_estimate(1.0, 2.0, 17, 123, 99, g), make_estimate(2.5, 2.0, 3, 123, 99, g),
                 make_estimate(10.0, 2.0, 0, 123, 99, g)};
  m.estimates[0].p_hat = 17.0 / 123.0;  // already so, keeps a 17-digit value in the file
  m.bounds = {{1.0, 1.5, 0.123456789012345678, 0.1, 0.2},
              {2.5, 1.5, 1e-300, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()}};
  return m;
}

}  // namespace

TEST_CASE("run id is a stable hash of command, config and engine") {
  const Config c = sample_config();
  const std::string id = compute_run_id("simulate", c);
  CHECK(id.size() == 16);
  CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(id == compute_run_id("simulate", c));
  CHECK(id != compute_run_id("bound", c));
  CHECK(id != compute_run_id("simulate", c, "ruinlab 0.9"));
  Config d = c;
  d.spec.seed = 100;
  CHECK(id != compute_run_id("simulate", d));
}

TEST_CASE("FNV-1a reference value") {
  // independent FNV-1a 64 over the same byte string
  const Config c = sample_config();
  const std::string bytes = std::string("beta") + "\n" + to_json(c).dump() + "\n" + kEngineVersion;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  CHECK(compute_run_id("beta", c) == std::string(buf));
}

TEST_CASE("write and read a run") {
  TempDir tmp;
  const RunManifest m = sample_manifest();
  const auto written = write_run(m, tmp.path.string());
  CHECK(written.size() == 3);
  const fs::path dir = tmp.path / m.run_id;
  CHECK(fs::exists(dir / "manifest.json"));
  const RunManifest back = read_run(dir.string());
  CHECK(back == m);
  CHECK(back.estimates[0].n_steps == 300);

  // writing again gives identical bytes
  const std::string est = slurp(dir / "estimates.csv");
  write_run(m, tmp.path.string());
  CHECK(slurp(dir / "estimates.csv") == est);
}

TEST_CASE("csv layout") {
  const RunManifest m = sample_manifest();
  const std::string est = estimates_csv(m.estimates);
  CHECK(est.rfind("y,T,p_hat,ci_low,ci_high,n_paths,n_ruined,seed\n", 0) == 0);
  CHECK(est.find("0.13821138211382114") != std::string::npos);
  const std::string b = bounds_csv(m.bounds);
  CHECK(b.rfind("y,alpha,bound,mc_estimate,mc_ci_hi\n", 0) == 0);
  CHECK(b.find("0.12345678901234568") != std::string::npos);
  CHECK(b.find("nan") != std::string::npos);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("manifest only when there are no rows") {
  TempDir tmp;
  RunManifest m = make_manifest("beta", sample_config());
  m.reports["beta"] = to_json(beta_report(BlackScholesReturns{0.3, 0.4}));
  const auto written = write_run(m, tmp.path.string());
  CHECK(written.size() == 1);
  const fs::path dir = tmp.path / m.run_id;
  CHECK_FALSE(fs::exists(dir / "estimates.csv"));
  CHECK_FALSE(fs::exists(dir / "bounds.csv"));
  const RunManifest back = read_run(dir.string());
  CHECK(back == m);
  CHECK(beta_report_from_json(back.reports["beta"]).beta_inf.root == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("a run without estimates.csv loads with no estimates") {
  TempDir tmp;
  RunManifest m = sample_manifest();
  write_run(m, tmp.path.string());
  const fs::path dir = tmp.path / m.run_id;
  fs::remove(dir / "estimates.csv");
  const RunManifest back = read_run(dir.string());
  CHECK(back.estimates.empty());
  CHECK(back.bounds == m.bounds);
}

TEST_CASE("tampered or corrupt runs are rejected") {
  TempDir tmp;
  const RunManifest m = sample_manifest();
  write_run(m, tmp.path.string());
  const fs::path dir = tmp.path / m.run_id;
  const std::string good = slurp(dir / "manifest.json");

  Json doc = Json::parse(good);
  doc["run_id"] = "0000000000000000";
  spit(dir / "manifest.json", doc.dump());
  CHECK(code_of([&] { read_run(dir.string()); }) == ErrorCode::SchemaMismatch);

  doc = Json::parse(good);
  doc["config"]["mc"]["n_paths"] = 124;
  spit(dir / "manifest.json", doc.dump());
  CHECK(code_of([&] { read_run(dir.string()); }) == ErrorCode::SchemaMismatch);

  doc = Json::parse(good);
  doc["schema"] = "ruinlab-run/0";
  spit(dir / "manifest.json", doc.dump());
  CHECK(code_of([&] { read_run(dir.string()); }) == ErrorCode::SchemaMismatch);

  spit(dir / "manifest.json", good.substr(0, good.size() / 2));
  CHECK(code_of([&] { read_run(dir.string()); }) == ErrorCode::CorruptFile);

  spit(dir / "manifest.json", good);
  spit(dir / "estimates.csv", "y,T,p_hat\n1,2,x\n");
  CHECK(code_of([&] { read_run(dir.string()); }) == ErrorCode::CorruptFile);

  CHECK(code_of([&] { read_run((tmp.path / "missing").string()); }) != ErrorCode::SchemaMismatch);
}

TEST_CASE("report documents round-trip") {
  const ReturnSpec bs = BlackScholesReturns{0.3, 0.4};
  const BetaReport br = beta_report(bs);
  CHECK(beta_report_from_json(to_json(br)) == br);
  CHECK(root_result_from_json(to_json(br.beta_inf)) == br.beta_inf);
  CHECK(beta_value_from_json(to_json(br.beta_T)) == br.beta_T);

  const CertainRuinReport cr = certain_ruin_levy(BlackScholesReturns{0.05, 0.4}, BusinessSpec{-0.05, 0.1, NoJumps{}});
  CHECK(certain_ruin_from_json(to_json(cr)) == cr);

  const MomentSet inf = infinite_horizon_moments(bs, 2.5);  // contains an unavailable moment (value inf)
  CHECK(moment_set_from_json(to_json(inf)) == inf);
  BetaValue beta{true, br.beta_inf.root, false, "root", ""};
  const BoundReport rep = make_bound_report(BusinessSpec{-0.1, 0.2, NoJumps{}}, inf, beta, {1, 2, 3, true});
  CHECK(bound_report_from_json(to_json(rep)) == rep);
  CHECK(bound_constants_from_json(to_json(rep.constants)) == rep.constants);
  CHECK(novikov_from_json(to_json(rep.novikov)) == rep.novikov);
  CHECK(moment_from_json(to_json(rep.moments.e_j_alpha)) == rep.moments.e_j_alpha);

  const RuinEstimate e = make_estimate(2.0, 1.0, 5, 1000, 3, GridSpec{});
  CHECK(estimate_from_json(to_json(e)) == e);

  std::vector<RuinEstimate> es;
  for (int i = 0; i < 6; ++i) es.push_back(make_estimate(std::pow(2.0, i), 1.0, 1000 >> i, 100000, 3, GridSpec{}));
  const SlopeFit fit = slope_fit(es, 1.0, 20);
  CHECK(slope_fit_from_json(to_json(fit)) == fit);

  BiasProbe p{{1, 2}, {0.1, 0.05}, {0.11, 0.06}, {0.01, 0.01}, 100, 200};
  CHECK(bias_probe_from_json(to_json(p)) == p);
}

TEST_CASE("path dump") {
  TempDir tmp;
  ExperimentSpec s;
  s.business = BusinessSpec{-0.1, 0.2, NoJumps{}};
  s.returns = BlackScholesReturns{0.3, 0.4};
  s.grid = GridSpec{1.0, 10, true};
  s.capitals = {1};
  s.n_paths = 1;
  PathOptions opts;
  opts.alphas = {1.5, 2.0};
  const PathEngine engine(s, opts);
  PathWorkspace ws;
  engine.run(0, ws);
  const std::string file = write_path_dump(tmp.path.string(), 0, ws.path);
  const std::string text = slurp(file);
  CHECK(text.rfind("time,r_hat,stoch_exp,i_func,", 0) == 0);
  CHECK(text.find("j_1.5") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 12);
}
