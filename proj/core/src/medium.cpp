#include "csl/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

double effective_mass_factor(double particle_density, double fluid_density) {
  if (!(particle_density > 0.0) || !std::isfinite(particle_density)) {
    throw InvalidParameter("effective_mass_factor: particle density must be positive, got " +
                           std::to_string(particle_density));
  }
  if (!(fluid_density >= 0.0) || !std::isfinite(fluid_density)) {
    throw InvalidParameter("effective_mass_factor: fluid density must be non-negative, got " +
                           std::to_string(fluid_density));
  }
  return 1.0 - fluid_density / particle_density;
}

double sodium_effective_density(double atom_radius_pm, double solvated_radius_pm,
                                double metal_density) {
  if (!(atom_radius_pm > 0.0) || !(solvated_radius_pm > 0.0) || !(metal_density > 0.0)) {
    throw InvalidParameter("sodium_effective_density: radii and density must be positive");
  }
  double ratio = atom_radius_pm / solvated_radius_pm;
  return ratio * ratio * ratio * metal_density;
}

namespace {

struct Lattice {
  std::vector<Vec3> sites;  // cm, sorted by (x, y, z)
  std::size_t per_edge = 0;
};

Lattice build_lattice(const MediumBox& box, double r_c) {
  if (!(r_c > 0.0)) throw InvalidParameter("medium generator: r_c must be positive");
  if (!(box.spacing > 0.0) || !(box.side > 0.0)) {
    throw InvalidParameter("medium generator: box side and spacing must be positive");
  }
  std::size_t k = static_cast<std::size_t>(std::floor(box.side / box.spacing + 1e-9));
  if (k == 0) {
    throw InvalidParameter("medium generator: box side " + std::to_string(box.side) +
                           " r_c holds no lattice site at spacing " +
                           std::to_string(box.spacing) + " r_c");
  }
  Lattice lat;
  lat.per_edge = k;
  lat.sites.reserve(k * k * k);
  double a = box.spacing * r_c;
  // x outermost: the first k^2 sites share the lowest x, so the
  // "concentrated" selection below is a low-x slab.
  for (std::size_t ix = 0; ix < k; ++ix)
    for (std::size_t iy = 0; iy < k; ++iy)
      for (std::size_t iz = 0; iz < k; ++iz)
        lat.sites.push_back({(ix + 0.5) * a, (iy + 0.5) * a, (iz + 0.5) * a});
  return lat;
}

// First n site indices in lattice order (a slab at the low-x side).
std::vector<std::size_t> concentrated_sites(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// n distinct site indices spread over the whole box, seeded partial
// Fisher-Yates.
std::vector<std::size_t> diffused_sites(std::size_t n_sites, std::size_t n,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n_sites);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n && i + 1 < n_sites; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_sites - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(n);
  return idx;
}

std::vector<bool> membership(std::size_t n_sites, const std::vector<std::size_t>& chosen) {
  std::vector<bool> is_in(n_sites, false);
  for (std::size_t i : chosen) is_in[i] = true;
  return is_in;
}

void check_count(std::size_t n, std::size_t n_sites, const char* what) {
  if (n > n_sites) {
    throw InvalidParameter(std::string("medium generator: ") + what + " count " +
                           std::to_string(n) + " exceeds the " + std::to_string(n_sites) +
                           " lattice sites; enlarge the box or shrink the spacing");
  }
}

}  // namespace

Superposition generate_swap_scenario(const MediumBox& box, std::size_t n_solutes, double r_c) {
  Lattice lat = build_lattice(box, r_c);
  check_count(n_solutes, lat.sites.size(), "solute");

  std::mt19937_64 rng(box.seed);
  auto in_a = membership(lat.sites.size(), concentrated_sites(n_solutes));
  auto in_b = membership(lat.sites.size(), diffused_sites(lat.sites.size(), n_solutes, rng));

  std::vector<Particle> pa, pb;
  pa.reserve(lat.sites.size());
  pb.reserve(lat.sites.size());
  for (std::size_t i = 0; i < lat.sites.size(); ++i) {
    pa.push_back({in_a[i] ? box.solute : box.fluid, lat.sites[i]});
    pb.push_back({in_b[i] ? box.solute : box.fluid, lat.sites[i]});
  }
  return Superposition::equal_weights(Configuration(std::move(pa)), Configuration(std::move(pb)));
}

Superposition generate_displacement_scenario(const MediumBox& box, std::size_t n_tagged,
                                             double r_c) {
  Lattice lat = build_lattice(box, r_c);
  check_count(n_tagged, lat.sites.size(), "tagged");

  std::mt19937_64 rng(box.seed);
  auto in_a = membership(lat.sites.size(), concentrated_sites(n_tagged));
  auto in_b = membership(lat.sites.size(), diffused_sites(lat.sites.size(), n_tagged, rng));

  // Branch-b positions: each site moves by spacing/4 in a random direction,
  // drawn in site order after the tag shuffle so both depend only on seed.
  const double shift = 0.25 * box.spacing * r_c;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Particle> pa, pb;
  pa.reserve(lat.sites.size());
  pb.reserve(lat.sites.size());
  for (std::size_t i = 0; i < lat.sites.size(); ++i) {
    Vec3 dir;
    double len = 0.0;
    do {
      dir = {gauss(rng), gauss(rng), gauss(rng)};
      len = norm(dir);
    } while (len < 1e-12);
    pa.push_back({in_a[i] ? box.solute : box.fluid, lat.sites[i]});
    pb.push_back({in_b[i] ? box.solute : box.fluid, lat.sites[i] + (shift / len) * dir});
  }
  return Superposition::equal_weights(Configuration(std::move(pa)), Configuration(std::move(pb)));
}

Superposition filter_species(const Superposition& sup, std::string_view species_name) {
  auto keep = [&](const Configuration& conf) {
    std::vector<Particle> out;
    for (const Particle& p : conf.particles()) {
      if (p.species.name == species_name) out.push_back(p);
    }
    return Configuration(std::move(out));
  };
  return Superposition(keep(sup.comp_a()), keep(sup.comp_b()), sup.amp_a(), sup.amp_b());
}

}  // namespace csl
