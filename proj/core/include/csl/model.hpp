#pragma once

// Core types for mass-proportional spontaneous-localization models.
//
// Units everywhere: lengths in cm, masses in daltons (the reference mass
// m_N is exactly 1 dalton), rates in 1/s, gamma in cm^3/s.  Mass densities
// used by the medium module are kg/m^3 and never mix with these.

#include <complex>
#include <string>
#include <vector>

#include "csl/vec3.hpp"

namespace csl {

// Reference mass appearing in mass-proportional couplings, daltons.
inline constexpr double nucleon_mass = 1.0;

struct Species {
  std::string name;
  double mass = nucleon_mass;  // daltons
};

struct Particle {
  Species species;
  Vec3 pos;  // cm
};

// An ordered list of classical particle positions with species labels.
class Configuration {
 public:
  Configuration() = default;
  // Validates finite coordinates and positive finite masses.
  explicit Configuration(std::vector<Particle> particles);

  const std::vector<Particle>& particles() const { return particles_; }
  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }

  double total_mass() const;  // daltons

  // Mass multiset, ascending; two configurations are superposable when
  // these compare equal.
  std::vector<double> sorted_masses() const;

 private:
  std::vector<Particle> particles_;
};

// Collapse-model parameters.  gamma is the microscopic coupling (cm^3/s),
// r_c the smearing length (cm).  The per-nucleon event rate
// lambda = gamma / (8 pi^{3/2} r_c^3) is derived, never stored.
class CollapseParams {
 public:
  CollapseParams(double gamma, double r_c);
  static CollapseParams from_lambda(double lambda, double r_c);

  double gamma() const { return gamma_; }
  double r_c() const { return r_c_; }
  double lambda() const;

 private:
  double gamma_;
  double r_c_;
};

double lambda_from_gamma(double gamma, double r_c);
double gamma_from_lambda(double lambda, double r_c);

// Gaussian smearing profile g(x) = (2 pi r_c^2)^{-3/2} exp(-|x|^2 / (2 r_c^2)).
// Normalized to unit integral; units cm^-3.
double smearing_g(const Vec3& x, double r_c);

// Two-point kernel G = g * g (self-convolution):
// G(x) = (4 pi r_c^2)^{-3/2} exp(-|x|^2 / (4 r_c^2)).  G(0) = lambda / gamma.
double pair_kernel_G(const Vec3& x, double r_c);

// Two-branch superposition |psi> = amp_a |comp_a> + amp_b |comp_b>.
class Superposition {
 public:
  // Requires |amp_a|^2 + |amp_b|^2 = 1 within 1e-12.
  Superposition(Configuration comp_a, Configuration comp_b,
                std::complex<double> amp_a, std::complex<double> amp_b);

  // Equal-weight convenience constructor (amplitudes 1/sqrt(2)).
  static Superposition equal_weights(Configuration comp_a, Configuration comp_b);

  const Configuration& comp_a() const { return comp_a_; }
  const Configuration& comp_b() const { return comp_b_; }
  std::complex<double> amp_a() const { return amp_a_; }
  std::complex<double> amp_b() const { return amp_b_; }

 private:
  Configuration comp_a_;
  Configuration comp_b_;
  std::complex<double> amp_a_;
  std::complex<double> amp_b_;
};

}  // namespace csl
