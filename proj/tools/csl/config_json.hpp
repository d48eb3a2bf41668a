#pragma once

// Strict JSON configuration loading for the csl tool.  Every object level
// declares its allowed keys and anything else is rejected, so a physics
// input can never silently fall back to a default through a typo.
//
// Each parse_* returns the engine object; the matching resolved_* returns
// the fully materialized echo (defaults filled, particle tables inlined)
// that gets embedded in every output artifact.  Re-parsing a resolved
// config resolves to itself, which is what makes reruns bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>

#include "csl/model.hpp"
#include "csl/rate_engine.hpp"
#include "csl/scenarios.hpp"
#include "csl/sde.hpp"
#include "json.hpp"

namespace cslcli {

using nlohmann::json;

// Schema mistakes (unknown keys, wrong types, missing fields).  Mapped to
// the parse-failure exit code, unlike engine errors.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path);

// Verifies `node` is an object, every required key is present and every
// present key is allowed.  `path` names the node in error messages.
void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional);

double get_number(const json& node, const std::string& path, const char* key);
double get_number_or(const json& node, const std::string& path, const char* key, double fallback);
std::uint64_t get_uint_or(const json& node, const std::string& path, const char* key,
                          std::uint64_t fallback);
std::string get_string(const json& node, const std::string& path, const char* key);
bool get_bool_or(const json& node, const std::string& path, const char* key, bool fallback);

// {"lambda" | "gamma", "r_c"}; exactly one coupling form.
csl::CollapseParams parse_params(const json& node, const std::string& path);
json resolved_params(const csl::CollapseParams& p);

// {"<name>": <mass in daltons>, ...}; needed by particle-table components.
std::map<std::string, double> parse_species(const json& node, const std::string& path);

// {"component_a", "component_b", "amp_a"?, "amp_b"?}; components either
// {"particles": [{"species"?, "mass", "pos"}]} or {"table": "<path>"} with
// table paths resolved against base_dir (the config file's directory).
csl::Superposition parse_superposition(const json& node, const std::string& path,
                                       const std::map<std::string, double>& species,
                                       const std::filesystem::path& base_dir);
json resolved_superposition(const csl::Superposition& sup);

// {"builtin": "<name>"} or {"name", "photon_count", "stages": [...]}.
csl::PerceptionScenario parse_scenario(const json& node, const std::string& path);
json resolved_scenario(const csl::PerceptionScenario& s);

// Optional node: nullptr yields the default criterion.
csl::BoundCriterion parse_criterion(const json* node, const std::string& path);
json resolved_criterion(const csl::BoundCriterion& c);

csl::ScanGrid parse_scan_grid(const json& node, const std::string& path);
json resolved_scan_grid(const csl::ScanGrid& g);

csl::FieldGrid parse_field_grid(const json* node, const std::string& path);
json resolved_field_grid(const csl::FieldGrid& g);

csl::EnsembleOptions parse_ensemble(const json& node, const std::string& path);
json resolved_ensemble(const csl::EnsembleOptions& o);

}  // namespace cslcli
