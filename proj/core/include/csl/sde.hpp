#pragma once

// Stochastic amplitude dynamics for a two-branch superposition with zero
// Hamiltonian.  The state stays in the span of the two branches, so the
// dynamics reduces to the amplitudes driven by white noise coupled to the
// smeared mass densities:
//
//   da_k = a_k [ sqrt(gamma) sum_c (mu_k - mu_bar)(x_c) w_c h^3
//                - (gamma/2) sum_c (mu_k - mu_bar)^2(x_c) h^3 dt ]
//
// with mu_bar = sum_k |a_k|^2 mu_k, per-cell Gaussian increments w_c of
// variance dt / h^3, followed by renormalization.  Ensemble averages of
// a_a conj(a_b) then decay at the discrete field rate
// (gamma/2) sum_c (mu_a - mu_b)^2 h^3.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "csl/density_grid.hpp"
#include "csl/model.hpp"

namespace csl {

// gamma_rate * dt above this is rejected as an unstable step size.
inline constexpr double max_rate_dt = 0.01;

// Log amplitude-ratio threshold calling a trajectory collapsed (ratio e^100).
inline constexpr double collapse_log_ratio = 100.0;

struct AmplitudeState {
  std::complex<double> amp_a;
  std::complex<double> amp_b;
  double time = 0.0;
};

// Branch densities sampled on a shared grid.
struct SdeProfiles {
  GridGeometry grid;
  std::vector<double> mu_a;
  std::vector<double> mu_b;
  // sum_c (mu_a - mu_b)^2 h^3; the discrete decay rate is gamma/2 times this.
  double delta_sq_volume = 0.0;
};

// Rasterizes both branches on `grid` (build it with make_grid, which
// enforces h <= r_c/2 and padding >= 6 r_c).
SdeProfiles reduce_to_amplitude_sde(const Superposition& sup, const CollapseParams& params,
                                    const GridGeometry& grid);

// (gamma/2) * delta_sq_volume; matches gamma_field on the same grid
// bit-for-bit (same raster, same accumulation).
double discrete_decay_rate(const SdeProfiles& profiles, const CollapseParams& params);

// Per-cell noise increments for one step: variance dt / h^3 each.
struct NoiseGrid {
  double dt = 0.0;
  double h = 0.0;
  std::size_t cells = 0;

  std::vector<double> sample(std::mt19937_64& rng) const;
};

// One Euler-Maruyama step over an explicit noise draw (noise.size() must
// equal the cell count), then renormalization.  Throws InvalidParameter
// when dt exceeds the stability bound max_rate_dt / rate.
void sde_step(AmplitudeState& state, const SdeProfiles& profiles, const CollapseParams& params,
              double dt, const std::vector<double>& noise);

enum class NoiseMode {
  // Draw one increment per grid cell and contract against the density
  // difference, exactly as written above.  Cost scales with the grid.
  per_cell,
  // Draw the contraction directly: for two branches every amplitude update
  // depends on the noise only through W = sum_c (mu_a - mu_b)(x_c) w_c h^3,
  // a zero-mean Gaussian of variance dt * delta_sq_volume, so sampling W
  // itself gives trajectories with the identical law at O(cells) less work.
  projected
};

struct EnsembleOptions {
  double dt = 1e-3;        // s
  double t_max = 3.0;      // s
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t save_every = 1;    // record every k-th step
  NoiseMode noise = NoiseMode::projected;
  std::size_t n_batches = 10;    // batch count for the fit standard error
};

struct EnsembleDecayEstimate {
  double rate = 0.0;  // fitted from the log-linear decay of |mean off-diagonal|
  double se = 0.0;    // batch-means standard error
  std::size_t n_traj = 0;
};

struct CurvePoint {
  double t = 0.0;
  double re_mean = 0.0;   // mean of Re a_a conj(a_b) over trajectories
  double im_mean = 0.0;
  double se = 0.0;        // standard error of the real part
  double mean_weight_a = 0.0;  // mean |a_a|^2 (martingale check)
  double weight_a_se = 0.0;
};

struct CollapseStats {
  std::size_t to_a = 0;  // trajectories ending on branch a
  std::size_t to_b = 0;
  std::size_t hit_ratio_threshold = 0;  // of those, decided by the e^100 ratio before t_max
};

struct EnsembleResult {
  EnsembleDecayEstimate estimate;
  double discrete_rate = 0.0;  // fit target implied by the grid
  std::vector<CurvePoint> curve;
  CollapseStats collapse;
  std::size_t fit_points = 0;  // leading curve points used in the fit window
};

// Runs n_traj independent trajectories with per-trajectory seeds derived
// from options.seed, fits the off-diagonal decay, and tallies collapse
// outcomes (ratio rule during the run, larger weight at t_max).  Results
// are reproducible bit-for-bit for equal worker counts.  Throws FitError
// (carrying the curve) when the signal does not decay.
EnsembleResult run_ensemble(const Superposition& sup, const CollapseParams& params,
                            const GridGeometry& grid, const EnsembleOptions& options);

}  // namespace csl
