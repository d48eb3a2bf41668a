#pragma once

// Regular-grid rasterization of smeared mass densities.  The field-method
// rate and the trajectory simulation both consume this raster, so the
// discrete rate implied by a simulation equals the field-method value on
// the same grid exactly.

#include <cstddef>
#include <vector>

#include "csl/model.hpp"

namespace csl {

inline constexpr std::size_t grid_default_max_cells = std::size_t{1} << 26;

struct GridGeometry {
  Vec3 origin;  // lower corner, cm; cell centers sit at origin + (i + 1/2) h
  double h = 0.0;   // cell edge, cm
  std::size_t nx = 0, ny = 0, nz = 0;

  std::size_t cell_count() const { return nx * ny * nz; }
  double cell_volume() const { return h * h * h; }
  Vec3 cell_center(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return {origin.x + (static_cast<double>(ix) + 0.5) * h,
            origin.y + (static_cast<double>(iy) + 0.5) * h,
            origin.z + (static_cast<double>(iz) + 0.5) * h};
  }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return ix + nx * (iy + ny * iz);
  }
};

// Builds a grid covering both components of the superposition with at least
// `padding` of margin beyond the particle bounding box.  Requires
// h <= r_c / 2 and padding >= 6 r_c; throws GridError when the cell count
// would exceed max_cells.
GridGeometry make_grid(const Superposition& sup, double r_c, double h, double padding,
                       std::size_t max_cells = grid_default_max_cells);

// Smeared mass density mu(x_c) = sum_i (m_i / m_N) g(x_c - x_i) sampled at
// cell centers.  Contributions are cut off beyond 9 r_c where the Gaussian
// is below 3e-18 of its peak.
std::vector<double> rasterize_density(const Configuration& conf, const GridGeometry& grid,
                                      double r_c);

// sum_c (mu_a - mu_b)^2 h^3, compensated summation.
double squared_difference_volume(const std::vector<double>& mu_a,
                                 const std::vector<double>& mu_b, double h);

}  // namespace csl
