#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruinlab/analytics.hpp"
#include "ruinlab/bounds.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/estimate.hpp"
#include "ruinlab/simulate.hpp"

namespace ruinlab {

inline constexpr const char* kEngineVersion = "ruinlab 1.0.0";
inline constexpr const char* kRunSchema = "ruinlab-run/1";

// One row of bounds.csv.
struct BoundRow {
  double y = 0.0;
  double alpha = 0.0;
  double bound = 0.0;
  double mc_estimate = 0.0;  // nan when no MC run accompanies the sweep
  double mc_ci_hi = 0.0;
  bool operator==(const BoundRow&) const;  // nan == nan
};

struct RunManifest {
  std::string schema = kRunSchema;
  std::string run_id;
  std::string command;
  std::string engine_version = kEngineVersion;
  std::string created_at;  // ISO 8601 UTC
  Config config;
  Json reports = Json::object();  // keyed by report kind
  std::vector<RuinEstimate> estimates;  // estimates.csv
  std::vector<BoundRow> bounds;         // bounds.csv
  bool operator==(const RunManifest&) const = default;
};

// FNV-1a 64 over command, canonical config dump and engine version, as 16 hex digits.
std::string compute_run_id(const std::string& command, const Config& config,
                           const std::string& engine_version = kEngineVersion);

// Fills run_id, engine_version and created_at (now).
RunManifest make_manifest(const std::string& command, const Config& config);

std::string utc_timestamp();

// Writes <out_dir>/<run_id>/manifest.json plus estimates.csv and bounds.csv
// when non-empty. Returns the written paths. Error{IoFailure} with the path.
std::vector<std::string> write_run(const RunManifest& manifest, const std::string& out_dir);

// Error{CorruptFile} for unparsable files, Error{SchemaMismatch} for a foreign
// schema or a run id that does not match the content.
RunManifest read_run(const std::string& dir);

// paths/<k>.csv inside a run directory: one row per grid point.
std::string write_path_dump(const std::string& run_dir, std::uint64_t k, const SimulatedPath& path);

// CSV text, numbers with 17 significant digits.
std::string estimates_csv(const std::vector<RuinEstimate>& estimates);
std::string bounds_csv(const std::vector<BoundRow>& rows);
std::string format_number(double x);

// Report documents.
Json to_json(const RuinEstimate& e);
Json to_json(const BetaValue& b);
Json to_json(const RootResult& r);
Json to_json(const BetaReport& r);
Json to_json(const BoundConstants& c);
Json to_json(const Moment& m);
Json to_json(const MomentSet& m);
Json to_json(const NovikovConstants& k);
Json to_json(const BoundReport& r);
Json to_json(const CertainRuinReport& r);
Json to_json(const SlopeFit& f);
Json to_json(const BiasProbe& p);

RuinEstimate estimate_from_json(const Json& j);
BetaValue beta_value_from_json(const Json& j);
RootResult root_result_from_json(const Json& j);
BetaReport beta_report_from_json(const Json& j);
BoundConstants bound_constants_from_json(const Json& j);
Moment moment_from_json(const Json& j);
MomentSet moment_set_from_json(const Json& j);
NovikovConstants novikov_from_json(const Json& j);
BoundReport bound_report_from_json(const Json& j);
CertainRuinReport certain_ruin_from_json(const Json& j);
SlopeFit slope_fit_from_json(const Json& j);
BiasProbe bias_probe_from_json(const Json& j);

}  // namespace ruinlab
