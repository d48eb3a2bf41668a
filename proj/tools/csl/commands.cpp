#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "config_json.hpp"
#include "csl/errors.hpp"
#include "csl/medium.hpp"
#include "csl/model.hpp"
#include "csl/particle_table.hpp"
#include "csl/rate_engine.hpp"
#include "csl/scenarios.hpp"
#include "csl/sde.hpp"
#include "csl/version.hpp"

namespace cslcli {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

std::string json_artifact(const json& config, std::uint64_t seed, const json& result) {
  json doc{{"version", csl::version_string},
           {"seed", seed},
           {"config", config},
           {"result", result}};
  return doc.dump(2) + "\n";
}

std::string csv_prologue(const json& config, std::uint64_t seed) {
  std::ostringstream os;
  os << "# csl " << csl::version_string << "\n";
  os << "# seed " << seed << "\n";
  os << "# config " << config.dump() << "\n";
  return os.str();
}

fs::path config_dir(const std::string& input) {
  fs::path dir = fs::path(input).parent_path();
  return dir.empty() ? fs::path(".") : dir;
}

std::string pick_format(const CommonArgs& args, const char* fallback) {
  if (args.format.empty()) return fallback;
  if (args.format != "json" && args.format != "csv") {
    throw ConfigError("unknown format '" + args.format + "' (json or csv)");
  }
  return args.format;
}

json rate_json(const csl::DecayRate& r) {
  json j{{"method", csl::to_string(r.method)},
         {"rate", r.rate},
         {"raw_rate", r.raw_rate},
         {"clamped", r.clamped}};
  if (r.clamped) {
    j["note"] = "raw pairwise sum was negative at roundoff scale; clamped to zero";
  } else if (r.rate == 0.0) {
    j["note"] = "zero decay rate: the branches carry identical smeared mass densities";
  }
  return j;
}

json span_json(const csl::SeparationSpan& s) {
  // Empty spans (no contributing pairs) arrive as min > max.
  if (s.min > s.max) return json{{"min", nullptr}, {"max", nullptr}};
  return json{{"min", s.min}, {"max", s.max}};
}

json regime_json(const csl::RegimeReport& rep) {
  return json{{"regime", csl::to_string(rep.regime)},
              {"same_index_cross", span_json(rep.same_index_cross)},
              {"cross", span_json(rep.cross)},
              {"intra_a", span_json(rep.intra_a)},
              {"intra_b", span_json(rep.intra_b)}};
}

json bound_json(double rate_sum, const csl::BoundCriterion& criterion) {
  csl::LambdaBound b = csl::lambda_bound(rate_sum, criterion);
  csl::LambdaBound br = csl::lambda_bound(csl::round_to_1sf(rate_sum), criterion);
  return json{{"rate_sum", rate_sum},
              {"rate_sum_rounded", csl::round_to_1sf(rate_sum)},
              {"lambda_min", b.lambda_min},
              {"lambda_min_rounded_sum", br.lambda_min},
              {"lambda_low", b.lambda_low},
              {"lambda_high", b.lambda_high}};
}

// Criterion assembled from an optional config node, then flag overrides.
csl::BoundCriterion criterion_from(const json* node, const std::string& path,
                                   const CommonArgs& args) {
  csl::BoundCriterion c = parse_criterion(node, path);
  if (args.threshold) c.gamma_t_threshold = *args.threshold;
  if (args.perception_time) c.perception_time = *args.perception_time;
  if (args.slack) c.slack_decades = *args.slack;
  return c;
}

csl::MediumBox parse_box(const json* node, const std::string& path) {
  csl::MediumBox box;
  if (!node) return box;
  check_keys(*node, path, {}, {"side", "spacing", "fluid", "solute", "seed"});
  box.side = get_number_or(*node, path, "side", box.side);
  box.spacing = get_number_or(*node, path, "spacing", box.spacing);
  if (node->contains("fluid")) {
    check_keys((*node)["fluid"], path + ".fluid", {"name", "mass"}, {});
    box.fluid = {get_string((*node)["fluid"], path + ".fluid", "name"),
                 get_number((*node)["fluid"], path + ".fluid", "mass")};
  }
  if (node->contains("solute")) {
    check_keys((*node)["solute"], path + ".solute", {"name", "mass"}, {});
    box.solute = {get_string((*node)["solute"], path + ".solute", "name"),
                  get_number((*node)["solute"], path + ".solute", "mass")};
  }
  box.seed = get_uint_or(*node, path, "seed", box.seed);
  return box;
}

json resolved_box(const csl::MediumBox& box) {
  return json{{"side", box.side},
              {"spacing", box.spacing},
              {"fluid", {{"name", box.fluid.name}, {"mass", box.fluid.mass}}},
              {"solute", {{"name", box.solute.name}, {"mass", box.solute.mass}}},
              {"seed", box.seed}};
}

}  // namespace

int cmd_rate(const CommonArgs& args) {
  const json cfg = load_json_file(args.input);
  check_keys(cfg, "<top>", {"params", "superposition"},
             {"species", "methods", "cutoff_multiplier", "grid"});

  const csl::CollapseParams params = parse_params(cfg["params"], "params");
  std::map<std::string, double> species;
  if (cfg.contains("species")) species = parse_species(cfg["species"], "species");
  const csl::Superposition sup =
      parse_superposition(cfg["superposition"], "superposition", species,
                          config_dir(args.input));

  std::vector<std::string> methods{"exact"};
  if (cfg.contains("methods")) {
    const json& m = cfg["methods"];
    if (!m.is_array() || m.empty()) {
      throw ConfigError("config: expected a non-empty array at methods");
    }
    methods.clear();
    for (const json& v : m) {
      if (!v.is_string()) throw ConfigError("config: expected strings in methods");
      methods.push_back(v.get<std::string>());
    }
  }
  const double cutoff = get_number_or(cfg, "<top>", "cutoff_multiplier", 6.0);
  const json* grid_node = cfg.contains("grid") ? &cfg["grid"] : nullptr;
  const csl::FieldGrid grid = parse_field_grid(grid_node, "grid");
  const int workers = args.workers.value_or(1);

  json rates = json::array();
  std::vector<csl::DecayRate> computed;
  for (const std::string& m : methods) {
    csl::DecayRate r;
    if (m == "exact") {
      r = csl::gamma_exact(sup, params, workers);
    } else if (m == "accelerated") {
      r = csl::gamma_accelerated(sup, params, cutoff);
    } else if (m == "field") {
      r = csl::gamma_field(sup, params, grid);
    } else {
      throw ConfigError("config: unknown method '" + m +
                        "' (allowed: exact accelerated field)");
    }
    computed.push_back(r);
    rates.push_back(rate_json(r));
  }

  json cross = json::array();
  for (std::size_t i = 0; i < computed.size(); ++i) {
    for (std::size_t j = i + 1; j < computed.size(); ++j) {
      const double a = computed[i].rate;
      const double b = computed[j].rate;
      const double abs_delta = std::abs(a - b);
      const double scale = std::max(std::abs(a), std::abs(b));
      cross.push_back(json{{"method_a", methods[i]},
                           {"method_b", methods[j]},
                           {"abs_delta", abs_delta},
                           {"rel_delta", scale > 0.0 ? abs_delta / scale : 0.0}});
    }
  }

  const csl::RegimeReport regime = csl::regime_classify(sup, params);

  json resolved{{"params", resolved_params(params)},
                {"superposition", resolved_superposition(sup)},
                {"methods", methods},
                {"cutoff_multiplier", cutoff},
                {"grid", resolved_field_grid(grid)}};
  json result{{"rates", rates}, {"cross_checks", cross}, {"regime", regime_json(regime)}};

  if (pick_format(args, "json") == "json") {
    emit(args.output, json_artifact(resolved, 0, result));
  } else {
    std::ostringstream os;
    os << csv_prologue(resolved, 0);
    os << "# regime " << csl::to_string(regime.regime) << "\n";
    os << "method,rate,raw_rate,clamped\n";
    for (std::size_t i = 0; i < computed.size(); ++i) {
      os << methods[i] << "," << g17(computed[i].rate) << "," << g17(computed[i].raw_rate)
         << "," << (computed[i].clamped ? 1 : 0) << "\n";
    }
    emit(args.output, os.str());
  }
  return 0;
}

int cmd_scenario(const CommonArgs& args) {
  // --input is a config file when one exists at that path, otherwise a
  // builtin scenario name.
  json cfg;
  if (fs::exists(args.input)) {
    json raw = load_json_file(args.input);
    if (raw.is_object() && raw.contains("scenario")) {
      cfg = std::move(raw);  // wrapper form, e.g. an embedded config
    } else {
      cfg = json{{"scenario", std::move(raw)}};
    }
  } else if (args.input.find('.') == std::string::npos &&
             args.input.find('/') == std::string::npos) {
    cfg = json{{"scenario", json{{"builtin", args.input}}}};
  } else {
    throw ConfigError("cannot open config file '" + args.input + "'");
  }
  check_keys(cfg, "<top>", {"scenario"}, {"criterion", "table"});

  csl::PerceptionScenario scenario = parse_scenario(cfg["scenario"], "scenario");
  if (args.photons) scenario.photon_count = *args.photons;
  const json* crit_node = cfg.contains("criterion") ? &cfg["criterion"] : nullptr;
  const csl::BoundCriterion criterion = criterion_from(crit_node, "criterion", args);
  const bool want_table = args.table || get_bool_or(cfg, "<top>", "table", false);

  const double sum = csl::scenario_rate_sum(scenario);
  json result = bound_json(sum, criterion);

  json per_stage = json::array();
  for (const csl::PerceptionStage& st : scenario.stages) {
    const double product = st.f * st.f * st.n * st.n * st.N;
    per_stage.push_back(json{{"name", st.name},
                             {"rate_product", product},
                             {"share", product * scenario.photon_count / sum}});
  }
  result["per_stage"] = std::move(per_stage);

  std::vector<csl::BoundTableRow> rows;
  if (want_table) {
    rows = csl::comparison_table(criterion);
    json tbl = json::array();
    for (const csl::BoundTableRow& r : rows) {
      tbl.push_back(json{{"label", r.label},
                         {"photon_count", r.photon_count},
                         {"rate_sum", r.rate_sum},
                         {"lambda_min", r.lambda_min},
                         {"lambda_min_rounded_sum", r.lambda_min_rounded_sum},
                         {"lambda_low", r.lambda_low},
                         {"lambda_high", r.lambda_high},
                         {"derived", r.derived},
                         {"note", r.note}});
    }
    result["table"] = std::move(tbl);
  }

  json resolved{{"scenario", resolved_scenario(scenario)},
                {"criterion", resolved_criterion(criterion)},
                {"table", want_table}};

  if (pick_format(args, "json") == "json") {
    emit(args.output, json_artifact(resolved, 0, result));
    return 0;
  }
  std::ostringstream os;
  os << csv_prologue(resolved, 0);
  os << "label,photon_count,rate_sum,lambda_min,lambda_min_rounded_sum,lambda_low,"
        "lambda_high,derived\n";
  auto row_line = [&os](const std::string& label, double photons, double s, double lmin,
                        double lmin_r, double llo, double lhi, bool derived) {
    os << label << "," << g17(photons) << "," << g17(s) << "," << g17(lmin) << ","
       << g17(lmin_r) << "," << g17(llo) << "," << g17(lhi) << "," << (derived ? 1 : 0)
       << "\n";
  };
  if (want_table) {
    for (const csl::BoundTableRow& r : rows) {
      row_line(r.label, r.photon_count, r.rate_sum, r.lambda_min, r.lambda_min_rounded_sum,
               r.lambda_low, r.lambda_high, r.derived);
    }
  } else {
    csl::LambdaBound b = csl::lambda_bound(sum, criterion);
    csl::LambdaBound br = csl::lambda_bound(csl::round_to_1sf(sum), criterion);
    row_line(scenario.name, scenario.photon_count, sum, b.lambda_min, br.lambda_min,
             b.lambda_low, b.lambda_high, true);
  }
  emit(args.output, os.str());
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  if (args.output.empty()) {
    throw ConfigError("simulate needs --output <prefix> (writes <prefix>curve.csv and "
                      "<prefix>summary.json)");
  }
  const json cfg = load_json_file(args.input);
  check_keys(cfg, "<top>", {"params", "superposition"}, {"species", "ensemble", "grid"});

  const csl::CollapseParams params = parse_params(cfg["params"], "params");
  std::map<std::string, double> species;
  if (cfg.contains("species")) species = parse_species(cfg["species"], "species");
  const csl::Superposition sup =
      parse_superposition(cfg["superposition"], "superposition", species,
                          config_dir(args.input));

  csl::EnsembleOptions opts;
  if (cfg.contains("ensemble")) opts = parse_ensemble(cfg["ensemble"], "ensemble");
  if (args.seed) opts.seed = *args.seed;
  if (args.workers) opts.workers = *args.workers;

  const json* grid_node = cfg.contains("grid") ? &cfg["grid"] : nullptr;
  const csl::FieldGrid field = parse_field_grid(grid_node, "grid");
  const csl::GridGeometry grid =
      csl::make_grid(sup, params.r_c(), field.h_over_r_c * params.r_c(),
                     field.padding_over_r_c * params.r_c(), field.max_cells);

  const csl::EnsembleResult res = csl::run_ensemble(sup, params, grid, opts);
  const csl::DecayRate analytic = csl::gamma_exact(sup, params, opts.workers);

  json resolved{{"params", resolved_params(params)},
                {"superposition", resolved_superposition(sup)},
                {"ensemble", resolved_ensemble(opts)},
                {"grid", resolved_field_grid(field)}};

  std::ostringstream curve;
  curve << csv_prologue(resolved, opts.seed);
  curve << "t,re_mean,im_mean,se,mean_weight_a,weight_a_se\n";
  for (const csl::CurvePoint& p : res.curve) {
    curve << g17(p.t) << "," << g17(p.re_mean) << "," << g17(p.im_mean) << "," << g17(p.se)
          << "," << g17(p.mean_weight_a) << "," << g17(p.weight_a_se) << "\n";
  }
  emit(args.output + "curve.csv", curve.str());

  json result{{"fitted_rate", res.estimate.rate},
              {"fitted_se", res.estimate.se},
              {"fit_points", res.fit_points},
              {"n_traj", res.estimate.n_traj},
              {"discrete_rate", res.discrete_rate},
              {"analytic_rate", analytic.rate},
              {"collapse",
               {{"to_a", res.collapse.to_a},
                {"to_b", res.collapse.to_b},
                {"hit_ratio_threshold", res.collapse.hit_ratio_threshold}}}};
  // z-score of the fit against the grid's own discrete rate, the value the
  // ensemble should reproduce exactly as dt -> 0.
  result["z_score"] = res.estimate.se > 0.0
                          ? json((res.estimate.rate - res.discrete_rate) / res.estimate.se)
                          : json(nullptr);
  result["discrete_vs_analytic_rel"] =
      analytic.rate > 0.0 ? json((res.discrete_rate - analytic.rate) / analytic.rate)
                          : json(nullptr);
  emit(args.output + "summary.json", json_artifact(resolved, opts.seed, result));
  return 0;
}

int cmd_medium(const CommonArgs& args) {
  if (args.output.empty()) {
    throw ConfigError("medium needs --output <prefix> (writes <prefix>_a.txt, "
                      "<prefix>_b.txt and <prefix>_summary.json)");
  }
  const json cfg = load_json_file(args.input);
  check_keys(cfg, "<top>", {"kind", "count", "params"}, {"box"});

  const std::string kind = get_string(cfg, "<top>", "kind");
  const std::size_t count = static_cast<std::size_t>(get_uint_or(cfg, "<top>", "count", 0));
  const csl::CollapseParams params = parse_params(cfg["params"], "params");
  const json* box_node = cfg.contains("box") ? &cfg["box"] : nullptr;
  csl::MediumBox box = parse_box(box_node, "box");
  if (args.seed) box.seed = *args.seed;

  csl::Superposition sup = [&] {
    if (kind == "swap") return csl::generate_swap_scenario(box, count, params.r_c());
    if (kind == "displacement") {
      return csl::generate_displacement_scenario(box, count, params.r_c());
    }
    throw ConfigError("config: kind must be 'swap' or 'displacement', got '" + kind + "'");
  }();

  csl::write_particle_table_file(args.output + "_a.txt", sup.comp_a());
  csl::write_particle_table_file(args.output + "_b.txt", sup.comp_b());

  const csl::DecayRate rate = csl::gamma_exact(sup, params, args.workers.value_or(1));
  std::map<std::string, std::size_t> counts;
  for (const csl::Particle& p : sup.comp_a().particles()) ++counts[p.species.name];
  json species_counts;
  for (const auto& [name, n] : counts) species_counts[name] = n;

  json resolved{{"kind", kind},
                {"count", count},
                {"params", resolved_params(params)},
                {"box", resolved_box(box)}};
  json result{{"rate", rate_json(rate)},
              {"particles_per_branch", sup.comp_a().particles().size()},
              {"species_counts", species_counts}};
  emit(args.output + "_summary.json", json_artifact(resolved, box.seed, result));
  return 0;
}

int cmd_scan(const CommonArgs& args) {
  const json cfg = load_json_file(args.input);
  check_keys(cfg, "<top>", {"scenario", "lambda_grid", "r_c_grid"}, {"criterion"});

  csl::PerceptionScenario scenario = parse_scenario(cfg["scenario"], "scenario");
  if (args.photons) scenario.photon_count = *args.photons;
  const csl::ScanGrid lambda_grid = parse_scan_grid(cfg["lambda_grid"], "lambda_grid");
  const csl::ScanGrid r_c_grid = parse_scan_grid(cfg["r_c_grid"], "r_c_grid");
  const json* crit_node = cfg.contains("criterion") ? &cfg["criterion"] : nullptr;
  const csl::BoundCriterion criterion = criterion_from(crit_node, "criterion", args);

  const csl::ScanResult res = csl::scan(scenario, lambda_grid, r_c_grid, criterion);

  json resolved{{"scenario", resolved_scenario(scenario)},
                {"lambda_grid", resolved_scan_grid(lambda_grid)},
                {"r_c_grid", resolved_scan_grid(r_c_grid)},
                {"criterion", resolved_criterion(criterion)}};

  if (pick_format(args, "csv") == "csv") {
    std::ostringstream os;
    os << csv_prologue(resolved, 0);
    os << "# caveat " << res.caveat << "\n";
    os << "lambda,r_c,gamma,rate,collapse_time,perceivable\n";
    for (const csl::ScanPoint& p : res.points) {
      os << g17(p.lambda) << "," << g17(p.r_c) << "," << g17(p.gamma) << "," << g17(p.rate)
         << "," << g17(p.collapse_time) << "," << (p.perceivable ? 1 : 0) << "\n";
    }
    emit(args.output, os.str());
    return 0;
  }
  json points = json::array();
  for (const csl::ScanPoint& p : res.points) {
    points.push_back(json{{"lambda", p.lambda},
                          {"r_c", p.r_c},
                          {"gamma", p.gamma},
                          {"rate", p.rate},
                          {"collapse_time", p.collapse_time},
                          {"perceivable", p.perceivable}});
  }
  emit(args.output,
       json_artifact(resolved, 0, json{{"caveat", res.caveat}, {"points", points}}));
  return 0;
}

}  // namespace cslcli
