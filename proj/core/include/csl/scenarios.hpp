#pragma once

// Visual-perception collapse scenarios.  A perception event is modeled as a
// cascade of stages; stage i moves N_i clusters of n_i nucleon-equivalents
// each by more than the smearing length, so the total decay rate is
//   Gamma = lambda * S,  S = photons * sum_i f_i^2 n_i^2 N_i,
// with f_i the effective-mass factor of the surrounding medium (1 in
// vacuum).  Requiring Gamma * t >= threshold within the perception time t
// bounds lambda from below.

#include <string>
#include <string_view>
#include <vector>

#include "csl/rate_engine.hpp"

namespace csl {

struct PerceptionStage {
  std::string name;
  double n = 1.0;  // nucleon-equivalents per displaced cluster
  double N = 1.0;  // number of displaced clusters
  double f = 1.0;  // effective-mass factor while immersed
};

struct PerceptionScenario {
  std::string name;
  double photon_count = 6.0;
  std::vector<PerceptionStage> stages;
};

// Stage ledgers for a minimally perceived flash (six photons):
//  - most_likely / extreme differ in how the channel-gating stage is
//    counted (many small clusters vs few large ones);
//  - corrected_* apply cytoplasm effective-mass factors (0.3 for the
//    protein stages, 0.08 for the solvated-ion stage).
std::vector<PerceptionScenario> bdf_builtin_scenarios();
PerceptionScenario builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

// S as defined above; Gamma = lambda * S.
double scenario_rate_sum(const PerceptionScenario& scenario);

// A stage is equivalent to N clusters of n constituents of effective unit
// mass f (in daltons); mass_cluster_rate over this spec at lambda = 1
// reproduces the stage's contribution to S.
ClusterSpec to_cluster_spec(const PerceptionStage& stage);

struct BoundCriterion {
  double gamma_t_threshold = 100.0;  // required Gamma * t for a definite record
  double perception_time = 0.1;      // s
  double slack_decades = 1.0;        // order-of-magnitude band on the bound
};

struct LambdaBound {
  double lambda_min = 0.0;   // (threshold / perception_time) / S
  double lambda_low = 0.0;   // lambda_min / 10^slack
  double lambda_high = 0.0;  // lambda_min * 10^slack
};

LambdaBound lambda_bound(double rate_sum, const BoundCriterion& criterion = {});

// Nearest value with one significant digit (e.g. 1.98e11 -> 2e11).
double round_to_1sf(double v);

// Range quoted by the original perception analysis for its own model
// variants.  Stored as-published for comparison; it is not derivable from
// the stage ledgers above.
inline constexpr double bdf_quoted_lambda_low = 2e-11;
inline constexpr double bdf_quoted_lambda_high = 5e-9;

struct BoundTableRow {
  std::string label;
  double photon_count = 0.0;
  double rate_sum = 0.0;    // S (0 for quoted rows)
  double lambda_min = 0.0;  // exact bound
  // Bound recomputed from S rounded to one significant digit first; this is
  // the arithmetic the headline ranges follow.
  double lambda_min_rounded_sum = 0.0;
  double lambda_low = 0.0;
  double lambda_high = 0.0;
  bool derived = true;  // false: quoted for comparison only
  std::string note;
};

// All builtin scenarios at the given criterion, six-photon and
// single-photon variants, plus the quoted comparison row.
std::vector<BoundTableRow> comparison_table(const BoundCriterion& criterion = {});

struct ScanGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 1;
  bool log_spaced = true;
};

std::vector<double> grid_values(const ScanGrid& grid);

struct ScanPoint {
  double lambda = 0.0;        // 1/s
  double r_c = 0.0;           // cm
  double gamma = 0.0;         // cm^3/s implied by (lambda, r_c)
  double rate = 0.0;          // lambda * S
  double collapse_time = 0.0; // threshold / rate
  bool perceivable = false;   // collapse_time <= perception_time
};

struct ScanResult {
  std::vector<ScanPoint> points;  // lambda-major, r_c-minor order
  std::string caveat;
};

// Verdict grid over (lambda, r_c).  The stage ledger is held fixed across
// r_c (see ScanResult::caveat), so the verdict varies with lambda only;
// r_c enters through the implied gamma.
ScanResult scan(const PerceptionScenario& scenario, const ScanGrid& lambda_grid,
                const ScanGrid& r_c_grid, const BoundCriterion& criterion = {});

}  // namespace csl
