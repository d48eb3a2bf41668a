#include "csl/particle_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "csl/errors.hpp"

namespace csl {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_particle_table(std::ostream& out, const Configuration& conf) {
  out << "# species x_cm y_cm z_cm\n";
  for (const Particle& p : conf.particles()) {
    out << p.species.name << ' ' << fmt_double(p.pos.x) << ' ' << fmt_double(p.pos.y) << ' '
        << fmt_double(p.pos.z) << '\n';
  }
}

void write_particle_table_file(const std::string& path, const Configuration& conf) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_particle_table(out, conf);
}

Configuration read_particle_table(std::istream& in,
                                  const std::map<std::string, double>& species_masses,
                                  const std::string& source_name) {
  std::vector<Particle> particles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string::size_type start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream row(line);
    std::string name;
    double x, y, z;
    if (!(row >> name >> x >> y >> z)) {
      throw ParseError(source_name + ":" + std::to_string(line_no) +
                       ": expected 'species x_cm y_cm z_cm', got '" + line + "'");
    }
    std::string extra;
    if (row >> extra) {
      throw ParseError(source_name + ":" + std::to_string(line_no) +
                       ": trailing field '" + extra + "'");
    }
    auto it = species_masses.find(name);
    if (it == species_masses.end()) {
      throw ParseError(source_name + ":" + std::to_string(line_no) + ": unknown species '" +
                       name + "' (not in the species mass map)");
    }
    particles.push_back({{name, it->second}, {x, y, z}});
  }
  return Configuration(std::move(particles));
}

Configuration read_particle_table_file(const std::string& path,
                                       const std::map<std::string, double>& species_masses) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open particle table '" + path + "'");
  return read_particle_table(in, species_masses, path);
}

}  // namespace csl
