#include "csl/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

namespace {

PerceptionScenario make_scenario(std::string name, double f_protein, double f_ion,
                                 bool extreme_gating) {
  PerceptionScenario s;
  s.name = std::move(name);
  s.photon_count = 6.0;
  s.stages = {
      {"transducin", 3.9e4, 20.0, f_protein},
      {"cgmp", 363.0, 2000.0, f_protein},
      extreme_gating ? PerceptionStage{"channel_ions", 5.0 * 1e3 * 23.0, 60.0, f_ion}
                     : PerceptionStage{"channel_ions", 5.0 * 3.0 * 23.0, 60.0 * 333.0, f_ion},
  };
  return s;
}

}  // namespace

std::vector<PerceptionScenario> bdf_builtin_scenarios() {
  return {
      make_scenario("most_likely", 1.0, 1.0, false),
      make_scenario("extreme", 1.0, 1.0, true),
      make_scenario("corrected_most_likely", 0.3, 0.08, false),
      make_scenario("corrected_extreme", 0.3, 0.08, true),
  };
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const PerceptionScenario& s : bdf_builtin_scenarios()) names.push_back(s.name);
  return names;
}

PerceptionScenario builtin_scenario(std::string_view name) {
  for (PerceptionScenario& s : bdf_builtin_scenarios()) {
    if (s.name == name) return std::move(s);
  }
  std::ostringstream os;
  os << "unknown builtin scenario '" << name << "'; available:";
  for (const std::string& n : builtin_scenario_names()) os << " " << n;
  throw InvalidParameter(os.str());
}

double scenario_rate_sum(const PerceptionScenario& scenario) {
  if (scenario.stages.empty()) {
    throw InvalidParameter("scenario '" + scenario.name + "' has no stages");
  }
  if (!(scenario.photon_count > 0.0) || !std::isfinite(scenario.photon_count)) {
    throw InvalidParameter("scenario '" + scenario.name + "': photon_count must be positive");
  }
  KahanSum s;
  for (const PerceptionStage& st : scenario.stages) {
    if (!(st.n > 0.0) || !(st.N > 0.0) || !std::isfinite(st.f)) {
      throw InvalidParameter("stage '" + st.name + "': need n > 0, N > 0 and finite f");
    }
    s.add(st.f * st.f * st.n * st.n * st.N);
  }
  return scenario.photon_count * s.value();
}

ClusterSpec to_cluster_spec(const PerceptionStage& stage) {
  return ClusterSpec{{Cluster{stage.f * nucleon_mass, stage.n, stage.N}}};
}

LambdaBound lambda_bound(double rate_sum, const BoundCriterion& criterion) {
  if (!(rate_sum > 0.0) || !std::isfinite(rate_sum)) {
    throw InvalidParameter("lambda_bound: rate sum must be positive, got " +
                           std::to_string(rate_sum));
  }
  if (!(criterion.gamma_t_threshold > 0.0) || !(criterion.perception_time > 0.0) ||
      !(criterion.slack_decades >= 0.0)) {
    throw InvalidParameter(
        "lambda_bound: threshold and perception time must be positive, slack non-negative");
  }
  LambdaBound b;
  b.lambda_min = criterion.gamma_t_threshold / criterion.perception_time / rate_sum;
  double slack = std::pow(10.0, criterion.slack_decades);
  b.lambda_low = b.lambda_min / slack;
  b.lambda_high = b.lambda_min * slack;
  return b;
}

double round_to_1sf(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  // Round in decimal so the result is exactly the double nearest to the
  // one-digit value (d * 10^k computed in binary can be off by an ulp).
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", v);
  return std::strtod(buf, nullptr);
}

std::vector<BoundTableRow> comparison_table(const BoundCriterion& criterion) {
  std::vector<BoundTableRow> rows;
  for (double photons : {6.0, 1.0}) {
    for (PerceptionScenario s : bdf_builtin_scenarios()) {
      s.photon_count = photons;
      double sum = scenario_rate_sum(s);
      LambdaBound b = lambda_bound(sum, criterion);
      LambdaBound br = lambda_bound(round_to_1sf(sum), criterion);
      BoundTableRow row;
      row.label = photons == 1.0 ? s.name + "_single_photon" : s.name;
      row.photon_count = photons;
      row.rate_sum = sum;
      row.lambda_min = b.lambda_min;
      row.lambda_min_rounded_sum = br.lambda_min;
      row.lambda_low = b.lambda_low;
      row.lambda_high = b.lambda_high;
      rows.push_back(std::move(row));
    }
  }
  BoundTableRow quoted;
  quoted.label = "bdf_quoted_range";
  quoted.lambda_low = bdf_quoted_lambda_low;
  quoted.lambda_high = bdf_quoted_lambda_high;
  quoted.derived = false;
  quoted.note = "range quoted by the original perception analysis for its own variants; "
                "kept for comparison, not re-derivable from the stage ledgers";
  rows.push_back(std::move(quoted));
  return rows;
}

std::vector<double> grid_values(const ScanGrid& grid) {
  if (grid.points == 0) throw InvalidParameter("scan grid needs at least one point");
  if (!(grid.min > 0.0) && grid.log_spaced) {
    throw InvalidParameter("log-spaced scan grid needs min > 0");
  }
  if (!(grid.max >= grid.min)) throw InvalidParameter("scan grid needs max >= min");
  std::vector<double> v;
  v.reserve(grid.points);
  if (grid.points == 1) {
    v.push_back(grid.min);
    return v;
  }
  for (std::size_t i = 0; i < grid.points; ++i) {
    double f = static_cast<double>(i) / static_cast<double>(grid.points - 1);
    v.push_back(grid.log_spaced ? grid.min * std::pow(grid.max / grid.min, f)
                                : grid.min + (grid.max - grid.min) * f);
  }
  return v;
}

ScanResult scan(const PerceptionScenario& scenario, const ScanGrid& lambda_grid,
                const ScanGrid& r_c_grid, const BoundCriterion& criterion) {
  double sum = scenario_rate_sum(scenario);
  ScanResult out;
  out.caveat = "stage cluster ledger held fixed across the r_c grid; the tallies assume "
               "displacements beyond the smearing length at r_c = 1e-5 cm";
  for (double lambda : grid_values(lambda_grid)) {
    for (double r_c : grid_values(r_c_grid)) {
      ScanPoint p;
      p.lambda = lambda;
      p.r_c = r_c;
      p.gamma = gamma_from_lambda(lambda, r_c);
      p.rate = lambda * sum;
      p.collapse_time = criterion.gamma_t_threshold / p.rate;
      p.perceivable = p.collapse_time <= criterion.perception_time;
      out.points.push_back(p);
    }
  }
  return out;
}

}  // namespace csl
