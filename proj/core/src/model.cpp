#include "csl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

namespace {

constexpr double pi = std::numbers::pi;

void check_r_c(double r_c) {
  if (!(r_c > 0.0) || !std::isfinite(r_c)) {
    throw InvalidParameter("smearing length r_c must be positive and finite, got " +
                           std::to_string(r_c));
  }
}

}  // namespace

Configuration::Configuration(std::vector<Particle> particles)
    : particles_(std::move(particles)) {
  for (const Particle& p : particles_) {
    if (!finite(p.pos)) {
      throw InvalidParameter("non-finite coordinates for particle of species '" +
                             p.species.name + "'");
    }
    if (!(p.species.mass > 0.0) || !std::isfinite(p.species.mass)) {
      throw InvalidParameter("species '" + p.species.name +
                             "' must have positive finite mass, got " +
                             std::to_string(p.species.mass));
    }
  }
}

double Configuration::total_mass() const {
  KahanSum s;
  for (const Particle& p : particles_) s.add(p.species.mass);
  return s.value();
}

std::vector<double> Configuration::sorted_masses() const {
  std::vector<double> m;
  m.reserve(particles_.size());
  for (const Particle& p : particles_) m.push_back(p.species.mass);
  std::sort(m.begin(), m.end());
  return m;
}

CollapseParams::CollapseParams(double gamma, double r_c) : gamma_(gamma), r_c_(r_c) {
  check_r_c(r_c);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidParameter("collapse coupling gamma must be non-negative and finite, got " +
                           std::to_string(gamma));
  }
}

CollapseParams CollapseParams::from_lambda(double lambda, double r_c) {
  check_r_c(r_c);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("collapse rate lambda must be non-negative and finite, got " +
                           std::to_string(lambda));
  }
  return CollapseParams(gamma_from_lambda(lambda, r_c), r_c);
}

double CollapseParams::lambda() const { return lambda_from_gamma(gamma_, r_c_); }

double lambda_from_gamma(double gamma, double r_c) {
  check_r_c(r_c);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidParameter("collapse coupling gamma must be non-negative and finite, got " +
                           std::to_string(gamma));
  }
  return gamma / (8.0 * std::pow(pi, 1.5) * r_c * r_c * r_c);
}

double gamma_from_lambda(double lambda, double r_c) {
  check_r_c(r_c);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("collapse rate lambda must be non-negative and finite, got " +
                           std::to_string(lambda));
  }
  return lambda * 8.0 * std::pow(pi, 1.5) * r_c * r_c * r_c;
}

double smearing_g(const Vec3& x, double r_c) {
  check_r_c(r_c);
  double s2 = r_c * r_c;
  return std::pow(2.0 * pi * s2, -1.5) * std::exp(-norm2(x) / (2.0 * s2));
}

double pair_kernel_G(const Vec3& x, double r_c) {
  check_r_c(r_c);
  double s2 = r_c * r_c;
  return std::pow(4.0 * pi * s2, -1.5) * std::exp(-norm2(x) / (4.0 * s2));
}

Superposition::Superposition(Configuration comp_a, Configuration comp_b,
                             std::complex<double> amp_a, std::complex<double> amp_b)
    : comp_a_(std::move(comp_a)),
      comp_b_(std::move(comp_b)),
      amp_a_(amp_a),
      amp_b_(amp_b) {
  double n = std::norm(amp_a) + std::norm(amp_b);
  if (std::abs(n - 1.0) > 1e-12) {
    throw InvalidParameter("superposition amplitudes must satisfy |amp_a|^2 + |amp_b|^2 = 1, got " +
                           std::to_string(n));
  }
}

Superposition Superposition::equal_weights(Configuration comp_a, Configuration comp_b) {
  double a = 1.0 / std::sqrt(2.0);
  return Superposition(std::move(comp_a), std::move(comp_b), a, a);
}

}  // namespace csl
