#pragma once

// Fluid-medium corrections and superposition generators for solvated
// particles.  A particle of mass m and volume V moving through a fluid of
// density rho_f displaces fluid, so the mass transported with it is
// m' = m - rho_f V; with V = m / rho_p this gives m' = m (1 - rho_f / rho_p).

#include <cstdint>
#include <string_view>

#include "csl/model.hpp"

namespace csl {

// 1 - fluid_density / particle_density.  Densities in kg/m^3; can be
// negative for particles less dense than the fluid.
double effective_mass_factor(double particle_density, double fluid_density);

// Crude effective density of a solvated sodium ion: metallic sodium packs
// atoms of radius atom_radius_pm at metal_density; the ion's effective
// radius in water is solvated_radius_pm, so the mass scales to
// (atom_radius / solvated_radius)^3 * metal_density.
double sodium_effective_density(double atom_radius_pm, double solvated_radius_pm,
                                double metal_density);

struct EffectiveMassModel {
  double particle_density = 0.0;  // kg/m^3
  double fluid_density = 0.0;     // kg/m^3
  double factor() const { return effective_mass_factor(particle_density, fluid_density); }
};

// Cubic lattice of molecules in a periodic-free box.  Lengths are in
// multiples of r_c and get scaled by the generator.
struct MediumBox {
  double side = 4.0;      // box edge, r_c units
  double spacing = 0.2;   // lattice constant, r_c units
  Species fluid{"fluid", 18.0};
  Species solute{"solute", 23.0};
  std::uint64_t seed = 0;
};

// Both branches occupy the identical lattice sites; only the species labels
// move.  Branch a concentrates the solutes at the low-x side, branch b
// spreads them over seeded-random sites.  With equal masses the decay rate
// vanishes identically.
Superposition generate_swap_scenario(const MediumBox& box, std::size_t n_solutes, double r_c);

// Every site holds a molecule; n_tagged of them are tagged.  Branch a:
// tagged molecules concentrated at the low-x side, positions exactly on the
// lattice.  Branch b: tagged molecules spread over seeded-random sites and
// every position redrawn, displaced by spacing/4 in a seeded-random
// direction.  Cross-branch nearest-site mismatch is spacing/4 exactly.
Superposition generate_displacement_scenario(const MediumBox& box, std::size_t n_tagged,
                                             double r_c);

// Sub-superposition keeping only particles of the named species (same
// amplitudes).  Used to compare full-medium rates against tagged-only ones.
Superposition filter_species(const Superposition& sup, std::string_view species_name);

}  // namespace csl
