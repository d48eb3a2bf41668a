#pragma once

// Decoherence / collapse rates for two-branch superpositions.
//
// The off-diagonal decay rate is
//   Gamma = (gamma / 2) sum_{i,j} (m_i m_j / m_N^2)
//           [ G(a_i - a_j) + G(b_i - b_j) - 2 G(a_i - b_j) ]
// with G the smearing self-convolution kernel, a_i / b_i the particle
// positions of the two branches.  This equals the field form
// (gamma / 2) integral (mu_a - mu_b)^2 over space, so it is non-negative
// up to floating-point cancellation.

#include <cstddef>
#include <string>
#include <vector>

#include "csl/density_grid.hpp"
#include "csl/model.hpp"

namespace csl {

enum class RateMethod { exact_pairwise, accelerated, field_quadrature, cluster_limit };

std::string to_string(RateMethod m);

struct DecayRate {
  double rate = 0.0;      // 1/s, clamped to >= 0
  double raw_rate = 0.0;  // pre-clamp value; tiny negatives arise from roundoff
  RateMethod method = RateMethod::exact_pairwise;
  bool clamped = false;
};

// O(N^2) pairwise sum with compensated accumulation.  Throws
// SpeciesMismatch unless both components carry the same mass multiset.
// Workers split the outer loop; the reduction order is fixed per worker
// count.
DecayRate gamma_exact(const Superposition& sup, const CollapseParams& params,
                      int workers = 1);

// Cell-list variant: pair contributions beyond cutoff_multiplier * r_c are
// dropped.  The neglected kernel values are below exp(-c^2/4) of the peak,
// so the absolute error is bounded by N^2 exp(-c^2/4) * G(0) per sum.
// Requires cutoff_multiplier >= 3.
DecayRate gamma_accelerated(const Superposition& sup, const CollapseParams& params,
                            double cutoff_multiplier = 6.0);

struct FieldGrid {
  double h_over_r_c = 0.25;      // cell size, must be <= 1/2
  double padding_over_r_c = 6.0; // margin beyond the particle bounding box, >= 6
  std::size_t max_cells = grid_default_max_cells;
};

// Midpoint-rule evaluation of (gamma / 2) integral (mu_a - mu_b)^2 on a
// regular grid.  Converges to gamma_exact as h -> 0.
DecayRate gamma_field(const Superposition& sup, const CollapseParams& params,
                      const FieldGrid& grid = {});
// Same, on a caller-supplied geometry (shared with the trajectory
// simulation so both report the identical discrete value).
DecayRate gamma_field(const Superposition& sup, const CollapseParams& params,
                      const GridGeometry& grid);

struct Cluster {
  double unit_mass = nucleon_mass;  // daltons per constituent
  double constituents = 1.0;        // constituents per cluster (n)
  double copies = 1.0;              // number of identical clusters (N)
};

struct ClusterSpec {
  std::vector<Cluster> clusters;
};

// Well-separated-cluster limit for unit-mass constituents:
//   Gamma = lambda sum_i N_i n_i^2.
// Requires every cluster's unit_mass to be exactly 1.
double cluster_rate(const ClusterSpec& spec, const CollapseParams& params);

// Mass-weighted cluster limit:
//   Gamma = (lambda / m_N^2) sum_i m_i^2 n_i^2 N_i.
double mass_cluster_rate(const ClusterSpec& spec, const CollapseParams& params);

// Separation regimes relative to the smearing length.  "near" means below
// 0.1 r_c (quantifying "well within r_c"); "far" means at least 3 r_c.
inline constexpr double regime_near_factor = 0.1;
inline constexpr double regime_far_factor = 3.0;

enum class Regime {
  negligible,      // every particle moved well within r_c: Gamma ~ 0
  quadratic,       // rigid cluster displaced far: Gamma ~ lambda N^2
  half_quadratic,  // one branch clustered, the other dispersed: Gamma ~ lambda N^2 / 2
  linear,          // independent far displacements: Gamma ~ lambda N
  general          // none of the limiting forms applies
};

std::string to_string(Regime r);

struct SeparationSpan {
  double min = 0.0;
  double max = 0.0;
};

struct RegimeReport {
  Regime regime = Regime::general;
  // Witness separations (cm) backing the classification.  Pairing of
  // same_index_cross follows particle order within the components.
  SeparationSpan same_index_cross;
  SeparationSpan cross;
  SeparationSpan intra_a;
  SeparationSpan intra_b;
};

// Classifies by the documented thresholds, checked in the order
// negligible, quadratic, half_quadratic, linear.  Components must be
// non-empty and equally sized.
RegimeReport regime_classify(const Superposition& sup, const CollapseParams& params);

}  // namespace csl
