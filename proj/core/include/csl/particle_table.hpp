#pragma once

// Plain-text particle tables:
//   # species x_cm y_cm z_cm
//   nucleon 0 0 0
//   Na 1.2e-05 0 0
// Whitespace separated; '#' starts a comment line.  Species masses are
// resolved against a caller-supplied name -> daltons map.

#include <iosfwd>
#include <map>
#include <string>

#include "csl/model.hpp"

namespace csl {

void write_particle_table(std::ostream& out, const Configuration& conf);
void write_particle_table_file(const std::string& path, const Configuration& conf);

Configuration read_particle_table(std::istream& in,
                                  const std::map<std::string, double>& species_masses,
                                  const std::string& source_name = "<stream>");
Configuration read_particle_table_file(const std::string& path,
                                       const std::map<std::string, double>& species_masses);

}  // namespace csl
