#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruinlab/bounds.hpp"
#include "ruinlab/model.hpp"

namespace ruinlab {

using Json = nlohmann::json;

struct CertainSettings {
  std::optional<double> y;  // defaults to the first capital
  std::vector<double> horizons;
  double p = 1.5;
  double s_horizon = 1e4;
  bool analytic_tail = true;
  bool operator==(const CertainSettings&) const = default;
};

struct BoundSettings {
  bool infinite_horizon = false;
  MomentMode moments = MomentMode::ClosedForm;
  bool operator==(const BoundSettings&) const = default;
};

struct SlopeSettings {
  std::optional<double> beta_ref;  // defaults to the classifier's beta_T
  std::int64_t floor = 50;
  bool operator==(const SlopeSettings&) const = default;
};

struct Config {
  ExperimentSpec spec;
  NovikovConstants novikov;
  CertainSettings certain;
  BoundSettings bound;
  SlopeSettings slope;
  std::vector<std::string> overrides;  // --set assignments in the order applied
  bool operator==(const Config&) const = default;
};

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
Json number_to_json(double x);
double number_from_json(const Json& j, const std::string& key);

Json to_json(const JumpSize& size);
Json to_json(const JumpFamily& jumps);
Json to_json(const BusinessSpec& business);
Json to_json(const ReturnSpec& returns);
Json to_json(const ExperimentSpec& spec);
Json to_json(const Config& config);

// Strict parsing: unknown keys, missing keys and wrong types throw
// Error{InvalidSpec} naming the dotted key path. Semantic checks are left to validate().
Config config_from_json(const Json& doc);
ExperimentSpec spec_from_json(const Json& doc);

// Reads a JSON document; Error{IoFailure} if unreadable, Error{CorruptFile} if malformed.
Json load_json_file(const std::string& path);

// Applies "a.b.c=value" to doc. The value is parsed as JSON when possible,
// otherwise taken as a string. Intermediate objects are created as needed.
void apply_override(Json& doc, const std::string& assignment);

}  // namespace ruinlab
