#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace csl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values, violated preconditions.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// The two branches of a superposition carry different particle content.
class SpeciesMismatch : public Error {
 public:
  SpeciesMismatch(std::string what, std::vector<double> masses_a, std::vector<double> masses_b)
      : Error(std::move(what)),
        masses_a_(std::move(masses_a)),
        masses_b_(std::move(masses_b)) {}

  // Sorted mass multisets of the two components, for diagnostics.
  const std::vector<double>& masses_a() const { return masses_a_; }
  const std::vector<double>& masses_b() const { return masses_b_; }

 private:
  std::vector<double> masses_a_;
  std::vector<double> masses_b_;
};

// Grid construction failed (resolution, padding, or memory budget).
class GridError : public Error {
 public:
  GridError(std::string what, std::size_t required_cells, std::size_t allowed_cells)
      : Error(std::move(what)), required_cells_(required_cells), allowed_cells_(allowed_cells) {}

  std::size_t required_cells() const { return required_cells_; }
  std::size_t allowed_cells() const { return allowed_cells_; }

 private:
  std::size_t required_cells_ = 0;
  std::size_t allowed_cells_ = 0;
};

// A decay-rate fit could not be performed; carries the raw curve.
class FitError : public Error {
 public:
  FitError(std::string what, std::vector<std::pair<double, double>> curve)
      : Error(std::move(what)), curve_(std::move(curve)) {}

  // (t, |mean off-diagonal|) samples that failed to fit.
  const std::vector<std::pair<double, double>>& curve() const { return curve_; }

 private:
  std::vector<std::pair<double, double>> curve_;
};

// Malformed input text (tables, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace csl
