#include "csl/density_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

namespace {

// Beyond this many smearing lengths a particle's Gaussian is dropped.
constexpr double stamp_radius_over_r_c = 9.0;

struct Box {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void include(const Vec3& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
};

}  // namespace

GridGeometry make_grid(const Superposition& sup, double r_c, double h, double padding,
                       std::size_t max_cells) {
  if (!(r_c > 0.0)) throw InvalidParameter("make_grid: r_c must be positive");
  if (!(h > 0.0) || h > r_c / 2.0 + 1e-15 * r_c) {
    throw InvalidParameter("make_grid: cell size h must satisfy 0 < h <= r_c / 2, got h = " +
                           std::to_string(h) + " with r_c = " + std::to_string(r_c));
  }
  if (padding < 6.0 * r_c - 1e-15 * r_c) {
    throw InvalidParameter("make_grid: padding must be at least 6 r_c, got " +
                           std::to_string(padding / r_c) + " r_c");
  }

  Box box;
  box.include({0, 0, 0});  // fallback for empty configurations
  bool any = false;
  for (const auto* conf : {&sup.comp_a(), &sup.comp_b()}) {
    for (const Particle& p : conf->particles()) {
      if (!any) {
        box = Box{};
        any = true;
      }
      box.include(p.pos);
    }
  }

  GridGeometry g;
  g.h = h;
  g.origin = {box.lo.x - padding, box.lo.y - padding, box.lo.z - padding};
  auto cells_along = [&](double lo, double hi) {
    return static_cast<std::size_t>(std::ceil((hi + padding - (lo - padding)) / h)) + 1;
  };
  g.nx = cells_along(box.lo.x, box.hi.x);
  g.ny = cells_along(box.lo.y, box.hi.y);
  g.nz = cells_along(box.lo.z, box.hi.z);

  // Overflow-safe budget check.
  if (g.nx != 0 && g.ny != 0 && g.nz != 0) {
    std::size_t need = g.nx;
    bool over = false;
    for (std::size_t d : {g.ny, g.nz}) {
      if (need > max_cells / d + 1) over = true;
      need *= d;
    }
    if (over || need > max_cells) {
      throw GridError("make_grid: grid of " + std::to_string(g.nx) + " x " +
                          std::to_string(g.ny) + " x " + std::to_string(g.nz) +
                          " cells exceeds the budget of " + std::to_string(max_cells) +
                          "; coarsen h or shrink the domain",
                      over ? std::numeric_limits<std::size_t>::max() : g.nx * g.ny * g.nz,
                      max_cells);
    }
  }
  return g;
}

std::vector<double> rasterize_density(const Configuration& conf, const GridGeometry& grid,
                                      double r_c) {
  if (!(r_c > 0.0)) throw InvalidParameter("rasterize_density: r_c must be positive");
  std::vector<double> mu(grid.cell_count(), 0.0);
  const double norm = std::pow(2.0 * std::numbers::pi * r_c * r_c, -1.5);
  const double inv2s2 = 1.0 / (2.0 * r_c * r_c);
  const double reach = stamp_radius_over_r_c * r_c;

  std::vector<double> gx, gy, gz;
  for (const Particle& p : conf.particles()) {
    const double w = norm * p.species.mass / nucleon_mass;

    auto axis_range = [&](double pos, double o, std::size_t n, std::vector<double>& out,
                          std::size_t& i0) {
      double lo = pos - reach, hi = pos + reach;
      long first = std::lround(std::floor((lo - o) / grid.h - 0.5));
      long last = std::lround(std::ceil((hi - o) / grid.h - 0.5));
      first = std::max(first, 0L);
      last = std::min(last, static_cast<long>(n) - 1);
      i0 = static_cast<std::size_t>(std::max(first, 0L));
      out.clear();
      for (long i = first; i <= last; ++i) {
        double d = o + (static_cast<double>(i) + 0.5) * grid.h - pos;
        out.push_back(std::exp(-d * d * inv2s2));
      }
    };

    std::size_t x0, y0, z0;
    axis_range(p.pos.x, grid.origin.x, grid.nx, gx, x0);
    axis_range(p.pos.y, grid.origin.y, grid.ny, gy, y0);
    axis_range(p.pos.z, grid.origin.z, grid.nz, gz, z0);

    for (std::size_t kz = 0; kz < gz.size(); ++kz) {
      for (std::size_t ky = 0; ky < gy.size(); ++ky) {
        const double wyz = w * gz[kz] * gy[ky];
        double* row = mu.data() + grid.index(x0, y0 + ky, z0 + kz);
        for (std::size_t kx = 0; kx < gx.size(); ++kx) row[kx] += wyz * gx[kx];
      }
    }
  }
  return mu;
}

double squared_difference_volume(const std::vector<double>& mu_a,
                                 const std::vector<double>& mu_b, double h) {
  if (mu_a.size() != mu_b.size()) {
    throw InvalidParameter("squared_difference_volume: field sizes differ");
  }
  KahanSum s;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    double d = mu_a[i] - mu_b[i];
    s.add(d * d);
  }
  return s.value() * h * h * h;
}

}  // namespace csl
