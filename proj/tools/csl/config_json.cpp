#include "config_json.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "csl/errors.hpp"
#include "csl/particle_table.hpp"

namespace cslcli {

namespace {

std::string describe(const json& v) {
  return v.type_name();
}

const json& need(const json& node, const std::string& path, const char* key) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ConfigError("config: missing key '" + std::string(key) + "' at " + path);
  }
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw ConfigError("config: expected a number at " + where + ", got " + describe(v));
  }
  return v.get<double>();
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!node.is_object()) {
    throw ConfigError("config: expected an object at " + path + ", got " + describe(node));
  }
  std::set<std::string> allowed;
  for (const char* k : required) allowed.insert(k);
  for (const char* k : optional) allowed.insert(k);
  // Unknown keys first: a typo'd key is more diagnostic than the missing
  // required key it causes.
  for (const auto& [key, value] : node.items()) {
    if (!allowed.count(key)) {
      std::ostringstream os;
      os << "config: unknown key '" << key << "' at " << path << " (allowed:";
      for (const std::string& k : allowed) os << " " << k;
      os << ")";
      throw ConfigError(os.str());
    }
  }
  for (const char* k : required) {
    if (!node.contains(k)) {
      throw ConfigError("config: missing key '" + std::string(k) + "' at " + path);
    }
  }
}

double get_number(const json& node, const std::string& path, const char* key) {
  return as_number(need(node, path, key), path + "." + key);
}

double get_number_or(const json& node, const std::string& path, const char* key,
                     double fallback) {
  auto it = node.find(key);
  return it == node.end() ? fallback : as_number(*it, path + "." + key);
}

std::uint64_t get_uint_or(const json& node, const std::string& path, const char* key,
                          std::uint64_t fallback) {
  auto it = node.find(key);
  if (it == node.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw ConfigError("config: expected a non-negative integer at " + path + "." + key +
                      ", got " + describe(*it));
  }
  return it->get<std::uint64_t>();
}

std::string get_string(const json& node, const std::string& path, const char* key) {
  const json& v = need(node, path, key);
  if (!v.is_string()) {
    throw ConfigError("config: expected a string at " + path + "." + key + ", got " +
                      describe(v));
  }
  return v.get<std::string>();
}

bool get_bool_or(const json& node, const std::string& path, const char* key, bool fallback) {
  auto it = node.find(key);
  if (it == node.end()) return fallback;
  if (!it->is_boolean()) {
    throw ConfigError("config: expected a boolean at " + path + "." + key + ", got " +
                      describe(*it));
  }
  return it->get<bool>();
}

csl::CollapseParams parse_params(const json& node, const std::string& path) {
  check_keys(node, path, {"r_c"}, {"lambda", "gamma"});
  const bool has_lambda = node.contains("lambda");
  const bool has_gamma = node.contains("gamma");
  if (has_lambda == has_gamma) {
    throw ConfigError("config: " + path + " needs exactly one of 'lambda' or 'gamma'");
  }
  const double r_c = get_number(node, path, "r_c");
  const double gamma = has_gamma ? get_number(node, path, "gamma")
                                 : csl::gamma_from_lambda(get_number(node, path, "lambda"), r_c);
  return csl::CollapseParams(gamma, r_c);
}

json resolved_params(const csl::CollapseParams& p) {
  // Echo gamma: it is the stored primitive, so the round trip is exact.
  return json{{"gamma", p.gamma()}, {"r_c", p.r_c()}};
}

std::map<std::string, double> parse_species(const json& node, const std::string& path) {
  if (!node.is_object()) {
    throw ConfigError("config: expected an object at " + path + ", got " + describe(node));
  }
  std::map<std::string, double> out;
  for (const auto& [name, mass] : node.items()) {
    out[name] = as_number(mass, path + "." + name);
  }
  return out;
}

namespace {

csl::Vec3 parse_pos(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("config: expected [x, y, z] at " + where);
  }
  return {as_number(v[0], where), as_number(v[1], where), as_number(v[2], where)};
}

std::complex<double> parse_amp(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError("config: expected [re, im] at " + where);
  }
  return {as_number(v[0], where), as_number(v[1], where)};
}

csl::Configuration parse_component(const json& node, const std::string& path,
                                   const std::map<std::string, double>& species,
                                   const std::filesystem::path& base_dir) {
  check_keys(node, path, {}, {"particles", "table"});
  const bool inline_particles = node.contains("particles");
  if (inline_particles == node.contains("table")) {
    throw ConfigError("config: " + path + " needs exactly one of 'particles' or 'table'");
  }
  if (!inline_particles) {
    if (species.empty()) {
      throw ConfigError("config: " + path +
                        " references a particle table but no 'species' map is given");
    }
    const std::string rel = get_string(node, path, "table");
    return csl::read_particle_table_file((base_dir / rel).string(), species);
  }
  const json& arr = node["particles"];
  if (!arr.is_array()) {
    throw ConfigError("config: expected an array at " + path + ".particles");
  }
  std::vector<csl::Particle> particles;
  particles.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = path + ".particles[" + std::to_string(i) + "]";
    check_keys(arr[i], where, {"mass", "pos"}, {"species"});
    csl::Particle p;
    p.species.name = arr[i].contains("species") ? get_string(arr[i], where, "species") : "p";
    p.species.mass = get_number(arr[i], where, "mass");
    p.pos = parse_pos(arr[i]["pos"], where + ".pos");
    particles.push_back(std::move(p));
  }
  return csl::Configuration(std::move(particles));
}

json component_echo(const csl::Configuration& conf) {
  json arr = json::array();
  for (const csl::Particle& p : conf.particles()) {
    arr.push_back(json{{"species", p.species.name},
                       {"mass", p.species.mass},
                       {"pos", {p.pos.x, p.pos.y, p.pos.z}}});
  }
  return json{{"particles", std::move(arr)}};
}

}  // namespace

csl::Superposition parse_superposition(const json& node, const std::string& path,
                                       const std::map<std::string, double>& species,
                                       const std::filesystem::path& base_dir) {
  check_keys(node, path, {"component_a", "component_b"}, {"amp_a", "amp_b"});
  csl::Configuration a = parse_component(node["component_a"], path + ".component_a", species,
                                         base_dir);
  csl::Configuration b = parse_component(node["component_b"], path + ".component_b", species,
                                         base_dir);
  const bool has_a = node.contains("amp_a");
  if (has_a != node.contains("amp_b")) {
    throw ConfigError("config: " + path + " needs both amplitudes or neither");
  }
  if (!has_a) return csl::Superposition::equal_weights(std::move(a), std::move(b));
  return csl::Superposition(std::move(a), std::move(b),
                            parse_amp(node["amp_a"], path + ".amp_a"),
                            parse_amp(node["amp_b"], path + ".amp_b"));
}

json resolved_superposition(const csl::Superposition& sup) {
  return json{{"component_a", component_echo(sup.comp_a())},
              {"component_b", component_echo(sup.comp_b())},
              {"amp_a", {sup.amp_a().real(), sup.amp_a().imag()}},
              {"amp_b", {sup.amp_b().real(), sup.amp_b().imag()}}};
}

csl::PerceptionScenario parse_scenario(const json& node, const std::string& path) {
  if (node.is_object() && node.contains("builtin")) {
    check_keys(node, path, {"builtin"}, {});
    try {
      return csl::builtin_scenario(get_string(node, path, "builtin"));
    } catch (const csl::InvalidParameter& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  check_keys(node, path, {"name", "stages"}, {"photon_count"});
  csl::PerceptionScenario s;
  s.name = get_string(node, path, "name");
  s.photon_count = get_number_or(node, path, "photon_count", 6.0);
  const json& stages = node["stages"];
  if (!stages.is_array() || stages.empty()) {
    throw ConfigError("config: expected a non-empty array at " + path + ".stages");
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string where = path + ".stages[" + std::to_string(i) + "]";
    check_keys(stages[i], where, {"name", "n", "N"}, {"f"});
    csl::PerceptionStage st;
    st.name = get_string(stages[i], where, "name");
    st.n = get_number(stages[i], where, "n");
    st.N = get_number(stages[i], where, "N");
    st.f = get_number_or(stages[i], where, "f", 1.0);
    s.stages.push_back(std::move(st));
  }
  return s;
}

json resolved_scenario(const csl::PerceptionScenario& s) {
  json stages = json::array();
  for (const csl::PerceptionStage& st : s.stages) {
    stages.push_back(json{{"name", st.name}, {"n", st.n}, {"N", st.N}, {"f", st.f}});
  }
  return json{{"name", s.name}, {"photon_count", s.photon_count}, {"stages", std::move(stages)}};
}

csl::BoundCriterion parse_criterion(const json* node, const std::string& path) {
  csl::BoundCriterion c;
  if (!node) return c;
  check_keys(*node, path, {}, {"gamma_t_threshold", "perception_time", "slack_decades"});
  c.gamma_t_threshold = get_number_or(*node, path, "gamma_t_threshold", c.gamma_t_threshold);
  c.perception_time = get_number_or(*node, path, "perception_time", c.perception_time);
  c.slack_decades = get_number_or(*node, path, "slack_decades", c.slack_decades);
  return c;
}

json resolved_criterion(const csl::BoundCriterion& c) {
  return json{{"gamma_t_threshold", c.gamma_t_threshold},
              {"perception_time", c.perception_time},
              {"slack_decades", c.slack_decades}};
}

csl::ScanGrid parse_scan_grid(const json& node, const std::string& path) {
  check_keys(node, path, {"min", "max", "points"}, {"log"});
  csl::ScanGrid g;
  g.min = get_number(node, path, "min");
  g.max = get_number(node, path, "max");
  g.points = static_cast<std::size_t>(get_uint_or(node, path, "points", 0));
  g.log_spaced = get_bool_or(node, path, "log", true);
  return g;
}

json resolved_scan_grid(const csl::ScanGrid& g) {
  return json{{"min", g.min}, {"max", g.max}, {"points", g.points}, {"log", g.log_spaced}};
}

csl::FieldGrid parse_field_grid(const json* node, const std::string& path) {
  csl::FieldGrid g;
  if (!node) return g;
  check_keys(*node, path, {}, {"h_over_r_c", "padding_over_r_c", "max_cells"});
  g.h_over_r_c = get_number_or(*node, path, "h_over_r_c", g.h_over_r_c);
  g.padding_over_r_c = get_number_or(*node, path, "padding_over_r_c", g.padding_over_r_c);
  g.max_cells = static_cast<std::size_t>(get_uint_or(*node, path, "max_cells", g.max_cells));
  return g;
}

json resolved_field_grid(const csl::FieldGrid& g) {
  return json{{"h_over_r_c", g.h_over_r_c},
              {"padding_over_r_c", g.padding_over_r_c},
              {"max_cells", g.max_cells}};
}

csl::EnsembleOptions parse_ensemble(const json& node, const std::string& path) {
  check_keys(node, path, {},
             {"dt", "t_max", "n_traj", "seed", "workers", "save_every", "noise", "n_batches"});
  csl::EnsembleOptions o;
  o.dt = get_number_or(node, path, "dt", o.dt);
  o.t_max = get_number_or(node, path, "t_max", o.t_max);
  o.n_traj = static_cast<std::size_t>(get_uint_or(node, path, "n_traj", o.n_traj));
  o.seed = get_uint_or(node, path, "seed", o.seed);
  o.workers = static_cast<int>(get_uint_or(node, path, "workers",
                                           static_cast<std::uint64_t>(o.workers)));
  o.save_every = static_cast<std::size_t>(get_uint_or(node, path, "save_every", o.save_every));
  o.n_batches = static_cast<std::size_t>(get_uint_or(node, path, "n_batches", o.n_batches));
  if (node.contains("noise")) {
    const std::string mode = get_string(node, path, "noise");
    if (mode == "projected") {
      o.noise = csl::NoiseMode::projected;
    } else if (mode == "per_cell") {
      o.noise = csl::NoiseMode::per_cell;
    } else {
      throw ConfigError("config: " + path + ".noise must be 'projected' or 'per_cell', got '" +
                        mode + "'");
    }
  }
  return o;
}

json resolved_ensemble(const csl::EnsembleOptions& o) {
  return json{{"dt", o.dt},
              {"t_max", o.t_max},
              {"n_traj", o.n_traj},
              {"seed", o.seed},
              {"workers", o.workers},
              {"save_every", o.save_every},
              {"noise", o.noise == csl::NoiseMode::projected ? "projected" : "per_cell"},
              {"n_batches", o.n_batches}};
}

}  // namespace cslcli
