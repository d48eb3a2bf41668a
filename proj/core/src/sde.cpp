#include "csl/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

namespace {

void check_stability(double rate, double dt) {
  if (rate * dt > max_rate_dt * (1.0 + 1e-12)) {
    throw InvalidParameter(
        "sde step size dt = " + std::to_string(dt) + " s is unstable: rate * dt = " +
        std::to_string(rate * dt) + " exceeds " + std::to_string(max_rate_dt) +
        "; choose dt <= " + std::to_string(max_rate_dt / rate) + " s");
  }
}

void renormalize(AmplitudeState& state) {
  double n = std::sqrt(std::norm(state.amp_a) + std::norm(state.amp_b));
  if (n <= 0.0) throw Error("sde step drove the state to zero norm");
  state.amp_a /= n;
  state.amp_b /= n;
}

}  // namespace

SdeProfiles reduce_to_amplitude_sde(const Superposition& sup, const CollapseParams& params,
                                    const GridGeometry& grid) {
  SdeProfiles p;
  p.grid = grid;
  p.mu_a = rasterize_density(sup.comp_a(), grid, params.r_c());
  p.mu_b = rasterize_density(sup.comp_b(), grid, params.r_c());
  p.delta_sq_volume = squared_difference_volume(p.mu_a, p.mu_b, grid.h);
  return p;
}

double discrete_decay_rate(const SdeProfiles& profiles, const CollapseParams& params) {
  return 0.5 * params.gamma() * profiles.delta_sq_volume;
}

std::vector<double> NoiseGrid::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt) / std::pow(h, 1.5));
  std::vector<double> w(cells);
  for (double& v : w) v = gauss(rng);
  return w;
}

void sde_step(AmplitudeState& state, const SdeProfiles& profiles, const CollapseParams& params,
              double dt, const std::vector<double>& noise) {
  if (noise.size() != profiles.grid.cell_count()) {
    throw InvalidParameter("sde_step: noise draw has " + std::to_string(noise.size()) +
                           " cells, grid has " + std::to_string(profiles.grid.cell_count()));
  }
  check_stability(discrete_decay_rate(profiles, params), dt);

  const double ra = std::norm(state.amp_a);
  const double rb = std::norm(state.amp_b);
  const double h3 = profiles.grid.cell_volume();

  KahanSum noise_a, noise_b, drift_a, drift_b;
  for (std::size_t c = 0; c < noise.size(); ++c) {
    const double mu_bar = ra * profiles.mu_a[c] + rb * profiles.mu_b[c];
    const double da = profiles.mu_a[c] - mu_bar;
    const double db = profiles.mu_b[c] - mu_bar;
    noise_a.add(da * noise[c]);
    noise_b.add(db * noise[c]);
    drift_a.add(da * da);
    drift_b.add(db * db);
  }

  const double sqrt_gamma = std::sqrt(params.gamma());
  const double half_gamma_dt = 0.5 * params.gamma() * dt;
  state.amp_a *= 1.0 + sqrt_gamma * noise_a.value() * h3 - half_gamma_dt * drift_a.value() * h3;
  state.amp_b *= 1.0 + sqrt_gamma * noise_b.value() * h3 - half_gamma_dt * drift_b.value() * h3;
  renormalize(state);
  state.time += dt;
}

namespace {

struct BatchAccum {
  // Indexed [batch][save point].
  std::vector<std::vector<double>> sum_re, sum_im, sum_re2, sum_wa, sum_wa2;
  std::vector<std::size_t> count;
  CollapseStats collapse;

  BatchAccum(std::size_t n_batches, std::size_t n_save)
      : sum_re(n_batches, std::vector<double>(n_save, 0.0)),
        sum_im(sum_re),
        sum_re2(sum_re),
        sum_wa(sum_re),
        sum_wa2(sum_re),
        count(n_batches, 0) {}

  void merge(const BatchAccum& other) {
    for (std::size_t b = 0; b < count.size(); ++b) {
      count[b] += other.count[b];
      for (std::size_t t = 0; t < sum_re[b].size(); ++t) {
        sum_re[b][t] += other.sum_re[b][t];
        sum_im[b][t] += other.sum_im[b][t];
        sum_re2[b][t] += other.sum_re2[b][t];
        sum_wa[b][t] += other.sum_wa[b][t];
        sum_wa2[b][t] += other.sum_wa2[b][t];
      }
    }
  }
};

}  // namespace

EnsembleResult run_ensemble(const Superposition& sup, const CollapseParams& params,
                            const GridGeometry& grid, const EnsembleOptions& options) {
  if (!(options.dt > 0.0) || !(options.t_max >= options.dt)) {
    throw InvalidParameter("run_ensemble: need dt > 0 and t_max >= dt");
  }
  if (options.n_traj == 0) throw InvalidParameter("run_ensemble: n_traj must be positive");
  if (options.save_every == 0) throw InvalidParameter("run_ensemble: save_every must be positive");

  const SdeProfiles profiles = reduce_to_amplitude_sde(sup, params, grid);
  const double rate = discrete_decay_rate(profiles, params);
  if (rate == 0.0) {
    throw FitError(
        "run_ensemble: the discrete decay rate is zero on this grid (identical branch "
        "densities); the off-diagonal mean does not decay",
        {});
  }
  check_stability(rate, options.dt);

  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(options.t_max / options.dt - 1e-12));
  std::vector<std::size_t> save_steps;
  for (std::size_t s = 0; s <= n_steps; s += options.save_every) save_steps.push_back(s);
  if (save_steps.back() != n_steps) save_steps.push_back(n_steps);
  const std::size_t n_save = save_steps.size();

  std::size_t n_batches = std::max<std::size_t>(1, std::min(options.n_batches, options.n_traj));

  const double q = profiles.delta_sq_volume;
  const double noise_sd = std::sqrt(options.dt * q);
  const double sqrt_gamma = std::sqrt(params.gamma());
  const double half_gamma_q_dt = 0.5 * params.gamma() * q * options.dt;

  int workers = std::max(1, options.workers);
  std::vector<BatchAccum> per_worker(static_cast<std::size_t>(workers),
                                     BatchAccum(n_batches, n_save));

  parallel_blocks(options.n_traj, workers, [&](int block, std::size_t begin, std::size_t end) {
    BatchAccum& acc = per_worker[static_cast<std::size_t>(block)];
    NoiseGrid noise_grid{options.dt, grid.h, grid.cell_count()};

    for (std::size_t traj = begin; traj < end; ++traj) {
      std::mt19937_64 rng(derive_seed(options.seed, traj));
      std::normal_distribution<double> gauss(0.0, 1.0);
      AmplitudeState state{sup.amp_a(), sup.amp_b(), 0.0};
      const std::size_t batch = traj * n_batches / options.n_traj;
      acc.count[batch] += 1;

      int decided = 0;  // +1 collapsed to a, -1 to b
      std::size_t next_save = 0;
      for (std::size_t s = 0;; ++s) {
        if (next_save < n_save && save_steps[next_save] == s) {
          const std::complex<double> od = state.amp_a * std::conj(state.amp_b);
          const double wa = std::norm(state.amp_a);
          acc.sum_re[batch][next_save] += od.real();
          acc.sum_im[batch][next_save] += od.imag();
          acc.sum_re2[batch][next_save] += od.real() * od.real();
          acc.sum_wa[batch][next_save] += wa;
          acc.sum_wa2[batch][next_save] += wa * wa;
          ++next_save;
        }
        if (s == n_steps) break;

        if (options.noise == NoiseMode::projected) {
          const double ra = std::norm(state.amp_a);
          const double rb = std::norm(state.amp_b);
          const double u = sqrt_gamma * noise_sd * gauss(rng);
          state.amp_a *= 1.0 + rb * u - half_gamma_q_dt * rb * rb;
          state.amp_b *= 1.0 - ra * u - half_gamma_q_dt * ra * ra;
          renormalize(state);
          state.time += options.dt;
        } else {
          sde_step(state, profiles, params, options.dt, noise_grid.sample(rng));
        }

        if (decided == 0) {
          const double log_ratio =
              2.0 * (std::log(std::abs(state.amp_a)) - std::log(std::abs(state.amp_b)));
          if (log_ratio >= collapse_log_ratio) decided = 1;
          else if (log_ratio <= -collapse_log_ratio) decided = -1;
        }
      }

      if (decided != 0) acc.collapse.hit_ratio_threshold += 1;
      else decided = std::norm(state.amp_a) >= std::norm(state.amp_b) ? 1 : -1;
      if (decided > 0) acc.collapse.to_a += 1;
      else acc.collapse.to_b += 1;
    }
  });

  BatchAccum total(n_batches, n_save);
  for (const BatchAccum& acc : per_worker) {
    total.merge(acc);
    total.collapse.to_a += acc.collapse.to_a;
    total.collapse.to_b += acc.collapse.to_b;
    total.collapse.hit_ratio_threshold += acc.collapse.hit_ratio_threshold;
  }

  const double n = static_cast<double>(options.n_traj);
  EnsembleResult result;
  result.discrete_rate = rate;
  result.collapse = total.collapse;
  result.curve.resize(n_save);
  for (std::size_t t = 0; t < n_save; ++t) {
    double sre = 0, sim = 0, sre2 = 0, swa = 0, swa2 = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      sre += total.sum_re[b][t];
      sim += total.sum_im[b][t];
      sre2 += total.sum_re2[b][t];
      swa += total.sum_wa[b][t];
      swa2 += total.sum_wa2[b][t];
    }
    CurvePoint& pt = result.curve[t];
    pt.t = static_cast<double>(save_steps[t]) * options.dt;
    pt.re_mean = sre / n;
    pt.im_mean = sim / n;
    pt.mean_weight_a = swa / n;
    if (options.n_traj > 1) {
      pt.se = std::sqrt(std::max(0.0, (sre2 - n * pt.re_mean * pt.re_mean) / (n - 1.0) / n));
      pt.weight_a_se =
          std::sqrt(std::max(0.0, (swa2 - n * pt.mean_weight_a * pt.mean_weight_a) / (n - 1.0) / n));
    }
  }

  // Fit window: leading points where the signal clearly beats ensemble noise.
  auto curve_for_error = [&] {
    std::vector<std::pair<double, double>> c;
    for (const CurvePoint& pt : result.curve) {
      c.emplace_back(pt.t, std::hypot(pt.re_mean, pt.im_mean));
    }
    return c;
  };
  std::size_t window = 0;
  while (window < n_save) {
    const CurvePoint& pt = result.curve[window];
    double mag = std::hypot(pt.re_mean, pt.im_mean);
    if (mag <= std::max(6.0 * pt.se, 1e-300)) break;
    ++window;
  }
  if (window < 5) {
    throw FitError("run_ensemble: only " + std::to_string(window) +
                       " usable curve points; signal is lost in ensemble noise",
                   curve_for_error());
  }

  std::vector<double> ts(window), logs(window);
  for (std::size_t t = 0; t < window; ++t) {
    ts[t] = result.curve[t].t;
    logs[t] = std::log(std::hypot(result.curve[t].re_mean, result.curve[t].im_mean));
  }
  LineFit fit = fit_line(ts, logs);
  if (!(fit.slope < 0.0)) {
    throw FitError("run_ensemble: off-diagonal mean does not decay (fitted slope " +
                       std::to_string(fit.slope) + " 1/s)",
                   curve_for_error());
  }
  result.estimate.rate = -fit.slope;
  result.estimate.n_traj = options.n_traj;
  result.fit_points = window;

  if (n_batches >= 2) {
    std::vector<double> rates;
    rates.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
      if (total.count[b] == 0) continue;
      std::vector<double> bl(window);
      bool ok = true;
      for (std::size_t t = 0; t < window; ++t) {
        double re = total.sum_re[b][t] / static_cast<double>(total.count[b]);
        double im = total.sum_im[b][t] / static_cast<double>(total.count[b]);
        double mag = std::hypot(re, im);
        if (mag <= 0.0) { ok = false; break; }
        bl[t] = std::log(mag);
      }
      if (ok) rates.push_back(-fit_line(ts, bl).slope);
    }
    if (rates.size() >= 2) {
      double mean = 0;
      for (double r : rates) mean += r;
      mean /= static_cast<double>(rates.size());
      double var = 0;
      for (double r : rates) var += (r - mean) * (r - mean);
      var /= static_cast<double>(rates.size() - 1);
      result.estimate.se = std::sqrt(var / static_cast<double>(rates.size()));
    }
  }
  return result;
}

}  // namespace csl
